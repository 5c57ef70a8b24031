"""
Scalar measures of superposition, entanglement and correlation.

Entropies are reported in bits. Inputs that are density matrices may be
given as :class:`~scopelab.states.DensityMatrix` or as raw arrays together
with ``dims``.
"""

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import numerics as nu
from .config import DEFAULT
from .errors import GeometryError, ValidationError
from .states import DensityMatrix, EnsembleDecomposition, PureState, schmidt_decompose


def _unit_coeffs(coeffs, tol):
    c = np.abs(np.asarray(coeffs, dtype=complex).reshape(-1))
    if c.size == 0:
        raise ValidationError("empty coefficient list")
    err = abs(math.fsum(c ** 2) - 1.0)
    if err > tol:
        raise ValidationError(f"coefficients not normalized (|sum |a|^2 - 1| = {err:.2e})")
    return c


def _pair_sum(c: np.ndarray) -> float:
    """sum_{i<j} c_i c_j, accumulated exactly."""
    return math.fsum(c[i] * c[j] for i in range(c.size) for j in range(i + 1, c.size))


def degree_of_superposition(coeffs, tol=DEFAULT) -> float:
    """``sum_{i<j} |a_i||a_j|`` for normalized amplitudes; lies in [0, (n-1)/2]."""
    return _pair_sum(_unit_coeffs(coeffs, tol.coeff_normalization))


def degree_of_entanglement(branch_coeffs, tol=DEFAULT) -> float:
    """Same pair sum over the branch coefficients ``c_i`` of
    ``sum_i c_i |psi_1i ... psi_mi>``."""
    return _pair_sum(_unit_coeffs(branch_coeffs, tol.coeff_normalization))


def l1_superposition(coeffs) -> float:
    """``(||a||_1^2 - ||a||_2^2) / 2``; equals the pair sum."""
    c = np.abs(np.asarray(coeffs, dtype=complex).reshape(-1))
    return 0.5 * (math.fsum(c) ** 2 - math.fsum(c ** 2))


class DirectCross(NamedTuple):
    direct: float
    cross: float
    reduced: float


def direct_cross_entanglement(a, b, tol=DEFAULT) -> DirectCross:
    """Degrees of entanglement of the direct (|11>+|22>) and cross
    (|12>+|21>) states of two qubit scopes, and their reduced combination
    ``E_d E_c / (E_d + E_c)`` (zero when both vanish)."""
    a1, a2 = _unit_coeffs(a, tol.coeff_normalization)
    b1, b2 = _unit_coeffs(b, tol.coeff_normalization)
    num = a1 * a2 * b1 * b2
    den_d = a1 ** 2 * b1 ** 2 + a2 ** 2 * b2 ** 2
    den_c = a1 ** 2 * b2 ** 2 + a2 ** 2 * b1 ** 2
    e_d = num / den_d if den_d > 0 else 0.0
    e_c = num / den_c if den_c > 0 else 0.0
    total = e_d + e_c
    reduced = e_d * e_c / total if total > 0 else 0.0
    return DirectCross(float(e_d), float(e_c), float(reduced))


def nonorthogonality(ensemble: EnsembleDecomposition) -> float:
    """Sum over parties and ordered member pairs xi != xi' of |<psi_xi|psi_xi'>|."""
    terms = []
    for party in ensemble.locals:
        for i, u in enumerate(party):
            for j, v in enumerate(party):
                if i != j:
                    terms.append(abs(np.vdot(u, v)))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# entropies


def _matrix(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else nu.as_matrix(rho)


def _dims(rho, dims):
    if dims is not None:
        return tuple(dims)
    if isinstance(rho, DensityMatrix):
        return rho.dims
    raise ValidationError("subsystem dims required")


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float).reshape(-1)
    p = p[p > 0]
    return max(0.0, -math.fsum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1.0 - x])


def von_neumann_entropy(rho, tol=DEFAULT) -> float:
    lam = nu.eigvalsh(_matrix(rho), tol)
    return shannon_entropy(np.clip(lam, 0.0, None))


# ---------------------------------------------------------------------------
# two-qubit measures


def _two_qubit_amplitudes(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        if psi.dims != (2, 2):
            raise ValidationError(f"concurrence needs a 2x2 state, got dims {psi.dims}")
        return psi.amplitudes
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.size != 4:
        raise ValidationError("concurrence needs four amplitudes")
    return v / np.linalg.norm(v)


def magic_basis_coefficients(psi) -> np.ndarray:
    """Coefficients of a two-qubit state in the magic basis
    ``e1 = (|00>+|11>)/sqrt2, e2 = i(|00>-|11>)/sqrt2,
    e3 = i(|01>+|10>)/sqrt2, e4 = (|01>-|10>)/sqrt2``."""
    a, b, c, d = _two_qubit_amplitudes(psi)
    s = np.sqrt(0.5)
    return np.array([(a + d) * s, -1j * (a - d) * s, -1j * (b + c) * s, (b - c) * s])


def concurrence(psi, basis_mode: str = "computation") -> float:
    """Concurrence of a pure two-qubit state evaluated in one of three bases.

    ``computation``: ``2|ad - bc|``; ``magic``: ``|sum alpha_i^2|`` over
    magic-basis coefficients; ``schmidt``: ``2 x y`` from the Schmidt
    coefficients.
    """
    if basis_mode == "computation":
        a, b, c, d = _two_qubit_amplitudes(psi)
        value = 2.0 * abs(a * d - b * c)
    elif basis_mode == "magic":
        alpha = magic_basis_coefficients(psi)
        value = abs(np.sum(alpha ** 2))
    elif basis_mode == "schmidt":
        state = psi if isinstance(psi, PureState) else PureState(_two_qubit_amplitudes(psi), (2, 2))
        lam = schmidt_decompose(state)[0]
        value = 2.0 * lam[0] * lam[1]
    else:
        raise ValidationError(f"unknown basis mode {basis_mode!r}")
    return float(min(max(value, 0.0), 1.0))


def entanglement_of_formation(c: float) -> float:
    """``h((1 + sqrt(1 - C^2)) / 2)`` in bits."""
    if not -1e-12 <= c <= 1.0 + 1e-12:
        raise ValidationError(f"concurrence {c} outside [0, 1]")
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def formation_entropy_of_ensemble(members) -> float:
    """``sum_i p_i E_f(C(psi_i))`` for a fixed decomposition ``[(p_i, psi_i), ...]``.

    No minimization over decompositions is attempted.
    """
    members = list(members)
    weights = np.array([p for p, _ in members], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValidationError("member weights must be a probability vector")
    return math.fsum(p * entanglement_of_formation(concurrence(psi)) for p, psi in members)


@dataclass(frozen=True)
class EntropyConcurrenceMatrix:
    concurrence: float
    matrix: np.ndarray


def entropy_concurrence_matrix(c: float) -> EntropyConcurrenceMatrix:
    """``(1/2) [[1 + s, C], [C, 1 - s]]`` with ``s = sqrt(1 - C^2)``.

    The lower diagonal entry is formed as ``1 - upper`` so the trace is
    exactly one in floating point.
    """
    if not 0.0 <= c <= 1.0:
        raise ValidationError(f"concurrence {c} outside [0, 1]")
    upper = 0.5 * (1.0 + math.sqrt(1.0 - c * c))
    lower = 1.0 - upper
    m = np.array([[upper, 0.5 * c], [0.5 * c, lower]])
    return EntropyConcurrenceMatrix(float(c), m)


def negativity(rho, dims=None, method: str = "trace_norm", party: int = 0, tol=DEFAULT) -> float:
    """Negativity of a bipartite state.

    ``trace_norm``: ``(||rho^T_A||_1 - 1) / 2``; ``spectrum``: absolute sum
    of the negative eigenvalues of ``rho^T_A``.
    """
    m = _matrix(rho)
    dims = _dims(rho, dims)
    if len(dims) != 2:
        raise ValidationError(f"negativity needs a bipartite state, got dims {dims}")
    pt = nu.partial_transpose(m, dims, party)
    if method == "trace_norm":
        value = 0.5 * (nu.trace_norm(pt, tol) - np.real(np.trace(m)))
    elif method == "spectrum":
        lam = nu.eigvalsh(pt, tol)
        value = abs(math.fsum(lam[lam < 0]))
    else:
        raise ValidationError(f"unknown negativity method {method!r}")
    return max(0.0, float(value))


def robustness_pure(rho, dims=None, tol=DEFAULT) -> float:
    """Robustness of a pure bipartite state, twice its negativity."""
    m = _matrix(rho)
    purity = float(np.real(np.trace(m @ m)))
    if purity < 1.0 - tol.purity:
        raise ValidationError(f"robustness_pure needs a pure state (purity {purity:.6f})")
    return 2.0 * negativity(m, _dims(rho, dims), tol=tol)


def ls_correlation(rho, sigma, measure=None, iterations: int = 60, tol=DEFAULT):
    """Largest weight ``lam`` with ``rho - lam * sigma`` positive semidefinite.

    Returns ``(lam, lam * measure(sigma))``; ``measure`` defaults to a
    function returning 1. The weight is bisected on the minimum eigenvalue.
    """
    r, s = _matrix(rho), _matrix(sigma)
    if r.shape != s.shape:
        raise ValidationError("rho and sigma must have the same shape")

    def feasible(lam):
        return nu.eigvalsh(r - lam * s, tol)[0] >= -tol.psd

    if feasible(1.0):
        lam = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        lam = lo
    value = lam * (measure(sigma) if measure is not None else 1.0)
    return lam, value


# ---------------------------------------------------------------------------
# correlation profile (state classification)

TABLE_I = {
    # entanglement, decohered classicality, nonorthogonality, coarse-grained classicality
    "entangled_qudit": (True, True, False, False),
    "decohered_qudit": (False, True, False, False),
    "ensemble_entangled": (True, True, True, True),
    "ensemble_decohered": (False, True, True, True),
    "separable": (False, False, True, True),
    "ensemble_product": (False, False, True, False),
    "product_basis": (False, False, False, False),
    "product_pure": (False, False, False, False),
}


@dataclass(frozen=True)
class CorrelationProfile:
    """Four correlation flags with their quantitative values.

    ``family`` is None for an untagged matrix; then the flags are None and
    only the spectral facts (``entropy``, ``negativity``) are filled.
    """

    family: Optional[str]
    entanglement: Optional[bool]
    entanglement_value: float
    decohered_classicality: Optional[bool]
    nonorthogonality: Optional[bool]
    nonorthogonality_value: float
    coarse_grained_classicality: Optional[bool]
    coarse_grained_entropy: float
    entropy: float
    negativity: Optional[float]

    @property
    def flags(self) -> tuple:
        return (self.entanglement, self.decohered_classicality,
                self.nonorthogonality, self.coarse_grained_classicality)


def _branch_entanglement(coeffs) -> float:
    c = np.abs(np.asarray(coeffs, dtype=complex))
    c = c / np.sqrt(math.fsum(c ** 2))
    return degree_of_entanglement(c)


def _lambda_overlaps(lambdas) -> float:
    """Ordered-pair overlaps of Schmidt-form members, counted for both parties."""
    vecs = [np.asarray(v, dtype=complex) for v in lambdas]
    single = math.fsum(abs(np.vdot(u, v)) for i, u in enumerate(vecs)
                       for j, v in enumerate(vecs) if i != j)
    return 2.0 * single


def classify(state: DensityMatrix) -> CorrelationProfile:
    tag = state.family_tag
    entropy = von_neumann_entropy(state)
    neg = negativity(state) if len(state.dims) == 2 else None
    if tag is None or tag.name not in TABLE_I:
        return CorrelationProfile(None, None, 0.0, None, None, 0.0, None, 0.0, entropy, neg)

    ent, dec, nonorth, cg = TABLE_I[tag.name]
    p = tag.params
    e_val = o_val = s_val = 0.0
    if tag.name == "entangled_qudit":
        a, b = np.asarray(p["a"]), np.asarray(p["b"])
        e_val = _branch_entanglement([a[i] * b[j] for i, j in p["pairing"]])
    elif tag.name == "ensemble_entangled":
        e_val = math.fsum(w * _branch_entanglement(lam) for w, lam in zip(p["weights"], p["lambdas"]))
    if tag.name in ("ensemble_entangled", "ensemble_decohered"):
        o_val = _lambda_overlaps(p["lambdas"])
    elif tag.name in ("separable", "ensemble_product"):
        ens = EnsembleDecomposition.from_members(p["weights"], [p["locals_a"], p["locals_b"]])
        o_val = nonorthogonality(ens)
    if cg:
        s_val = shannon_entropy(p["weights"])
    return CorrelationProfile(tag.name, ent, e_val, dec, nonorth, o_val, cg, s_val, entropy, neg)


# ---------------------------------------------------------------------------
# scope magnitude


def _distance_matrix(distances=None, energies=None) -> np.ndarray:
    if (distances is None) == (energies is None):
        raise ValidationError("give exactly one of distances or energies")
    if energies is not None:
        e = np.asarray(energies, dtype=float).reshape(-1)
        return np.abs(e[:, None] - e[None, :])
    d = np.asarray(distances, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError("distances must be a square matrix")
    if np.any(d < 0) or np.max(np.abs(d - d.T)) > 1e-12 or np.any(np.diag(d) != 0):
        raise ValidationError("distances must be symmetric, nonnegative, zero on the diagonal")
    return d


def _triangle_area(a: float, b: float, c: float, rtol: float = 1e-12) -> float:
    a, b, c = sorted((a, b, c), reverse=True)
    if a - (b + c) > rtol * max(a, 1.0):
        raise GeometryError(f"distances {a}, {b}, {c} violate the triangle inequality")
    # Kahan's arrangement of Heron's formula
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(q, 0.0))


def _cayley_menger_volume2(d: np.ndarray) -> float:
    """Squared volume of the simplex with squared-distance matrix ``d**2``."""
    n = d.shape[0]
    cm = np.ones((n + 1, n + 1))
    cm[0, 0] = 0.0
    cm[1:, 1:] = d ** 2
    k = n - 1
    coef = (-1) ** n / (2.0 ** k * math.factorial(k) ** 2)
    return coef * float(np.linalg.det(cm))


def scope_magnitude(distances=None, energies=None) -> float:
    """Length, area or volume of the simplex spanned by up to four scope states.

    Distances come either as a matrix or from energies via ``|E_i - E_j|``.
    Three points use Heron's formula; four use the Cayley-Menger determinant
    after every triangular face has been checked. Five or more states are
    rejected.
    """
    d = _distance_matrix(distances, energies)
    n = d.shape[0]
    if n == 0:
        raise ValidationError("a scope has at least one state")
    if n > 4:
        raise GeometryError(f"magnitude is defined for at most four states, got {n}")
    if n == 1:
        return 0.0
    if n == 2:
        return float(d[0, 1])
    for i, j, k in itertools.combinations(range(n), 3):
        area = _triangle_area(d[i, j], d[i, k], d[j, k])
    if n == 3:
        return area
    scale = float(np.max(d))
    v2 = _cayley_menger_volume2(d)
    if v2 < -1e-10 * scale ** 6:
        raise GeometryError("distances cannot be realized as a tetrahedron")
    return math.sqrt(max(v2, 0.0))

"""
State construction: scopes, active operators, the bipartite state families,
Schmidt decomposition, classical reduction, and the two-stage decoherence of
a wave function of an ensemble state (WFES).

Every constructed :class:`DensityMatrix` carries a :class:`FamilyTag` naming
the constructor and its parameters. Operations that depend on how a state
was built (classification, classical reduction, sub-decoherence) read the
tag; a raw matrix only supports spectral questions.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import numerics as nu
from .config import DEFAULT
from .errors import ValidationError

FAMILIES = (
    "product_basis",
    "product_pure",
    "ensemble_product",
    "entangled_qudit",
    "decohered_qudit",
    "separable",
    "ensemble_entangled",
    "ensemble_decohered",
)

SHAPES = {1: "point", 2: "segment", 3: "triangle", 4: "tetrahedron"}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _normalized(vec, what="vector"):
    """Return (unit vector, original norm); zero vectors are rejected."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ValidationError(f"{what} is empty")
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise ValidationError(f"{what} is the zero vector")
    return v / nrm, nrm


def _as_tuple(v) -> tuple:
    return tuple(complex(x) for x in np.asarray(v, dtype=complex).reshape(-1))


@dataclass(frozen=True)
class FamilyTag:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        dims = nu.check_dims(self.dims, amps.size)
        err = abs(float(np.vdot(amps, amps).real) - 1.0)
        if err > DEFAULT.normalization:
            raise ValidationError(f"pure state not normalized (|norm^2 - 1| = {err:.2e})")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_amplitudes(cls, amps, dims=None) -> "PureState":
        v, _ = _normalized(amps, "amplitudes")
        return cls(v, tuple(dims) if dims is not None else (v.size,))

    def density(self, family_tag: Optional[FamilyTag] = None) -> "DensityMatrix":
        return DensityMatrix(nu.projector(self.amplitudes), self.dims, family_tag)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple
    family_tag: Optional[FamilyTag] = None

    def __post_init__(self):
        m = nu.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got {m.shape}")
        dims = nu.check_dims(self.dims, m.shape[0])
        if not nu.is_hermitian(m):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > DEFAULT.trace:
            raise ValidationError(f"density matrix trace {tr.real:.15g} != 1")
        lo = nu.eigvalsh(m)[0]
        if lo < -DEFAULT.psd:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def with_tag(self, tag: Optional[FamilyTag]) -> "DensityMatrix":
        return DensityMatrix(self.matrix, self.dims, tag)


@dataclass(frozen=True)
class ScopeDecomposition:
    """Per-party scope coefficients plus, for entangled scopes, the branch map.

    ``branch_map`` lists branches as tuples of per-party basis indices; the
    same index never appears twice for one party (the one-to-one branch rule).
    ``scale`` records the norm the raw coefficients were divided by.
    """

    coeffs: tuple
    branch_map: Optional[tuple] = None
    labels: Optional[tuple] = None
    scale: tuple = ()

    def __post_init__(self):
        coeffs = tuple(_frozen(c) for c in self.coeffs)
        if not coeffs:
            raise ValidationError("scope needs at least one party")
        for c in coeffs:
            err = abs(float(np.vdot(c, c).real) - 1.0)
            if err > DEFAULT.normalization:
                raise ValidationError("scope coefficients are not normalized")
        object.__setattr__(self, "coeffs", coeffs)
        if self.branch_map is not None:
            branches = tuple(tuple(int(i) for i in b) for b in self.branch_map)
            _check_branches(branches, [c.size for c in coeffs])
            object.__setattr__(self, "branch_map", branches)

    @property
    def parties(self) -> int:
        return len(self.coeffs)

    @property
    def shape(self) -> str:
        """Geometric shape named by the number of scope states (single party)."""
        n = self.coeffs[0].size
        return SHAPES.get(n, "ball")

    @property
    def dims(self) -> tuple:
        return tuple(c.size for c in self.coeffs)

    def branch_amplitudes(self) -> np.ndarray:
        """Unnormalized ``prod_mu c^mu_{i_mu}`` for each branch."""
        if self.branch_map is None:
            raise ValidationError("scope has no branch map")
        return np.array([np.prod([self.coeffs[mu][i] for mu, i in enumerate(b)])
                         for b in self.branch_map])

    def state(self) -> PureState:
        if self.parties == 1:
            return PureState(self.coeffs[0], self.dims)
        if self.branch_map is None:
            vec = nu.tensor_product(*self.coeffs)
            return PureState(vec, self.dims)
        amps = self.branch_amplitudes()
        norm = np.sqrt(np.sum(np.abs(amps) ** 2))
        if norm == 0.0:
            raise ValidationError("every realized branch has zero amplitude")
        vec = np.zeros(int(np.prod(self.dims)), dtype=complex)
        for b, amp in zip(self.branch_map, amps):
            vec[np.ravel_multi_index(b, self.dims)] += amp / norm
        return PureState(vec, self.dims)


def _check_branches(branches, dims):
    for b in branches:
        if len(b) != len(dims):
            raise ValidationError(f"branch {b} does not name one index per party")
        for mu, i in enumerate(b):
            if not 0 <= i < dims[mu]:
                raise ValidationError(f"branch index {i} out of range for party {mu}")
    for mu in range(len(dims)):
        used = [b[mu] for b in branches]
        if len(set(used)) != len(used):
            raise ValidationError(
                f"pairing is not one-to-one: party {mu} index reused in {used}"
            )


@dataclass(frozen=True)
class EnsembleDecomposition:
    """Weights ``p_xi`` with per-party member states ``locals[mu][xi]``.

    ``gamma`` optionally holds complex amplitudes with ``|gamma|^2 = p``.
    """

    weights: tuple
    locals: tuple
    gamma: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > DEFAULT.normalization:
            raise ValidationError("ensemble weights must be a probability vector")
        parties = []
        for party in self.locals:
            members = tuple(_frozen(v) for v in party)
            if len(members) != w.size:
                raise ValidationError("every party needs one local state per weight")
            for v in members:
                if abs(float(np.vdot(v, v).real) - 1.0) > DEFAULT.normalization:
                    raise ValidationError("ensemble local state is not normalized")
            parties.append(members)
        if not parties:
            raise ValidationError("ensemble needs at least one party")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "locals", tuple(parties))
        if self.gamma is not None:
            g = np.asarray(self.gamma, dtype=complex).reshape(-1)
            if g.size != w.size or np.max(np.abs(np.abs(g) ** 2 - w)) > DEFAULT.normalization:
                raise ValidationError("|gamma_k|^2 must equal the weights")
            object.__setattr__(self, "gamma", _as_tuple(g))

    @classmethod
    def from_members(cls, weights, locals, gamma=None) -> "EnsembleDecomposition":
        """Normalize weights and local states before validation."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() == 0:
            raise ValidationError("weights must be nonnegative and not all zero")
        w = w / w.sum()
        parties = [[_normalized(v, "local state")[0] for v in party] for party in locals]
        if gamma is not None:
            g = np.asarray(gamma, dtype=complex)
            g = g / np.linalg.norm(g)
            w = np.abs(g) ** 2
            gamma = g
        return cls(tuple(w), tuple(tuple(p) for p in parties), gamma)

    @classmethod
    def from_gamma(cls, gamma, members) -> "EnsembleDecomposition":
        """Single-party WFES ensemble ``sum_k gamma_k |psi_k>``."""
        g = np.asarray(gamma, dtype=complex)
        return cls.from_members(np.abs(g) ** 2, [members], g)

    @property
    def dims(self) -> tuple:
        return tuple(party[0].size for party in self.locals)

    def density(self) -> np.ndarray:
        """``sum_xi p_xi rho^1_xi (x) rho^2_xi (x) ...`` as a matrix."""
        d = int(np.prod(self.dims))
        out = np.zeros((d, d), dtype=complex)
        for xi, p in enumerate(self.weights):
            vec = nu.tensor_product(*[party[xi] for party in self.locals])
            out += p * nu.projector(vec)
        return out


@dataclass(frozen=True)
class ActiveOperatorSet:
    operators: tuple
    scope: PureState

    @property
    def anti(self) -> tuple:
        """The anti-active operators ``1 - A_i``."""
        eye = np.eye(self.scope.amplitudes.size)
        return tuple(eye - a for a in self.operators)

    def weights(self) -> np.ndarray:
        s = self.scope.amplitudes
        return np.array([np.vdot(s, a @ s).real for a in self.operators])


# ---------------------------------------------------------------------------
# scopes and active operators


def make_scope(coeffs, labels=None):
    """Build a single-party scope from (possibly unnormalized) weights.

    Returns ``(ScopeDecomposition, PureState)``.
    """
    v, nrm = _normalized(coeffs, "scope coefficients")
    if labels is not None and len(labels) != v.size:
        raise ValidationError("one label per scope state required")
    scope = ScopeDecomposition((v,), labels=tuple(labels) if labels else None, scale=(nrm,))
    return scope, scope.state()


def active_operators(scope: ScopeDecomposition, tol=DEFAULT) -> ActiveOperatorSet:
    """Projectors that act each scope state (or entangled branch) out of the scope."""
    dims = scope.dims
    if scope.parties == 1:
        n = dims[0]
        ops = tuple(nu.projector(nu.ket(i, n)) for i in range(n))
    else:
        if scope.branch_map is None:
            raise ValidationError("multi-party scope needs a branch map")
        ops = tuple(
            nu.tensor_product(*[nu.projector(nu.ket(i, dims[mu])) for mu, i in enumerate(b)])
            for b in scope.branch_map
        )
    aset = ActiveOperatorSet(ops, scope.state())
    _check_active(aset, tol)
    return aset


def _check_active(aset: ActiveOperatorSet, tol) -> None:
    ops = aset.operators
    for i, a in enumerate(ops):
        if np.max(np.abs(a @ a - a)) > tol.projector:
            raise ValidationError(f"active operator {i} is not idempotent")
        for j in range(i + 1, len(ops)):
            if np.max(np.abs(a @ ops[j])) > tol.projector:
                raise ValidationError(f"active operators {i} and {j} are not orthogonal")
    if abs(aset.weights().sum() - 1.0) > tol.projector:
        raise ValidationError("active operators do not exhaust the scope")


# ---------------------------------------------------------------------------
# entanglement of scopes


def resolve_pairing(pairing, n: int, m: int) -> tuple:
    """Turn ``"direct"``, ``"cross"``, a permutation list or explicit
    ``(i, j)`` pairs into a tuple of index pairs."""
    k = min(n, m)
    if isinstance(pairing, str):
        if pairing == "direct":
            return tuple((i, i) for i in range(k))
        if pairing == "cross":
            return tuple((i, k - 1 - i) for i in range(k))
        raise ValidationError(f"unknown pairing {pairing!r}")
    items = list(pairing)
    if items and all(isinstance(x, (int, np.integer)) for x in items):
        return tuple((i, int(j)) for i, j in enumerate(items))
    return tuple((int(i), int(j)) for i, j in items)


def entangled_scope(scope_a: ScopeDecomposition, scope_b: ScopeDecomposition,
                    pairing="direct") -> ScopeDecomposition:
    """Two-party scope with branches ``a_i b_j |psi_i>|phi_j>``.

    A pairing shorter than ``min(n, m)`` models a partially realized scope.
    """
    if scope_a.parties != 1 or scope_b.parties != 1:
        raise ValidationError("entangle takes two single-party scopes")
    n, m = scope_a.dims[0], scope_b.dims[0]
    pairs = resolve_pairing(pairing, n, m)
    if not pairs or len(pairs) > min(n, m):
        raise ValidationError(f"pairing must realize between 1 and {min(n, m)} branches")
    return ScopeDecomposition(scope_a.coeffs + scope_b.coeffs, branch_map=pairs)


def entangle(scope_a: ScopeDecomposition, scope_b: ScopeDecomposition,
             pairing="direct") -> PureState:
    return entangled_scope(scope_a, scope_b, pairing).state()


def schmidt_decompose(psi: PureState, tol=DEFAULT):
    """Schmidt form ``psi = sum_i lambda_i |a_i>|b_i>`` of a bipartite state.

    Returns ``(lambdas, basis_a, basis_b)`` with orthonormal columns and
    ``lambdas`` descending.
    """
    if len(psi.dims) != 2:
        raise ValidationError(f"Schmidt decomposition needs two parties, got dims {psi.dims}")
    da, db = psi.dims
    res = nu.svd(psi.amplitudes.reshape(da, db), tol)
    k = min(da, db)
    lambdas = res.singular_values[:k]
    basis_a = res.left_vectors[:, :k]
    basis_b = res.right_vectors[:, :k].conj()
    return lambdas, basis_a, basis_b


# ---------------------------------------------------------------------------
# state families


def _vec(params, key, size=None):
    if key not in params:
        raise ValidationError(f"missing parameter {key!r}")
    v, _ = _normalized(params[key], key)
    if size is not None and v.size != size:
        raise ValidationError(f"{key} has length {v.size}, expected {size}")
    return v


def _weights(params):
    if "weights" not in params:
        raise ValidationError("missing parameter 'weights'")
    w = np.asarray(params["weights"], dtype=float).reshape(-1)
    if w.size == 0 or np.any(w < 0) or w.sum() == 0:
        raise ValidationError("weights must be nonnegative and not all zero")
    return w / w.sum()


def _members(params, key, count):
    if key not in params:
        raise ValidationError(f"missing parameter {key!r}")
    members = [_normalized(v, key)[0] for v in params[key]]
    if len(members) != count:
        raise ValidationError(f"{key} needs {count} members, got {len(members)}")
    dims = {v.size for v in members}
    if len(dims) != 1:
        raise ValidationError(f"{key} members have mismatched dimensions {sorted(dims)}")
    return members


def _branch_eta(a, b, pairs):
    return np.array([a[i] * b[j] for i, j in pairs])


def build_family(family: str, **params) -> DensityMatrix:
    """Construct one of the eight named bipartite state families.

    Parameters by family:

    - ``product_basis``: ``dims=(dA, dB)``, ``index=(i, j)``
    - ``product_pure``: ``a``, ``b`` local amplitude vectors
    - ``ensemble_product``: ``weights``, ``locals_a``, ``locals_b``
    - ``entangled_qudit`` / ``decohered_qudit``: ``a``, ``b``, optional
      ``pairing`` (default ``"direct"``)
    - ``separable``: ``weights``, ``locals_a``, ``locals_b``
    - ``ensemble_entangled`` / ``ensemble_decohered``: ``weights``,
      ``lambdas`` (one Schmidt coefficient vector per member, shared
      product basis)

    Vectors and weights are normalized on the way in; the normalized values
    are what the family tag records.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")

    if family == "product_basis":
        da, db = (int(d) for d in params.get("dims", (2, 2)))
        i, j = (int(x) for x in params.get("index", (0, 0)))
        if not (0 <= i < da and 0 <= j < db):
            raise ValidationError(f"basis index {(i, j)} outside dims {(da, db)}")
        vec = np.kron(nu.ket(i, da), nu.ket(j, db))
        tag = FamilyTag(family, {"dims": (da, db), "index": (i, j)})
        return DensityMatrix(nu.projector(vec), (da, db), tag)

    if family == "product_pure":
        a, b = _vec(params, "a"), _vec(params, "b")
        rho = np.kron(nu.projector(a), nu.projector(b))
        return DensityMatrix(rho, (a.size, b.size),
                             FamilyTag(family, {"a": _as_tuple(a), "b": _as_tuple(b)}))

    if family in ("entangled_qudit", "decohered_qudit"):
        a, b = _vec(params, "a"), _vec(params, "b")
        pairing = params.get("pairing", "direct")
        pairs = resolve_pairing(pairing, a.size, b.size)
        _check_branches(pairs, (a.size, b.size))
        eta = _branch_eta(a, b, pairs)
        total = float(np.sum(np.abs(eta) ** 2))
        if total == 0.0:
            raise ValidationError("all branch coefficients a_i b_j vanish")
        da, db = a.size, b.size
        tag = FamilyTag(family, {"a": _as_tuple(a), "b": _as_tuple(b),
                                 "pairing": tuple(tuple(p) for p in pairs)})
        if family == "entangled_qudit":
            vec = np.zeros(da * db, dtype=complex)
            for (i, j), e in zip(pairs, eta):
                vec[i * db + j] = e
            rho = np.outer(vec, vec.conj()) / total
        else:
            rho = np.zeros((da * db, da * db), dtype=complex)
            for (i, j), e in zip(pairs, eta):
                rho[i * db + j, i * db + j] = abs(e) ** 2 / total
        return DensityMatrix(rho, (da, db), tag)

    if family in ("ensemble_product", "separable"):
        w = _weights(params)
        la = _members(params, "locals_a", w.size)
        lb = _members(params, "locals_b", w.size)
        tag = FamilyTag(family, {"weights": tuple(w.tolist()),
                                 "locals_a": tuple(_as_tuple(v) for v in la),
                                 "locals_b": tuple(_as_tuple(v) for v in lb)})
        if family == "separable":
            rho = sum(p * np.kron(nu.projector(x), nu.projector(y)) for p, x, y in zip(w, la, lb))
        else:
            rho_a = sum(p * nu.projector(x) for p, x in zip(w, la))
            rho_b = sum(p * nu.projector(y) for p, y in zip(w, lb))
            rho = np.kron(rho_a, rho_b)
        return DensityMatrix(rho, (la[0].size, lb[0].size), tag)

    # ensemble_entangled / ensemble_decohered
    w = _weights(params)
    lambdas = _members(params, "lambdas", w.size)
    d = lambdas[0].size
    tag = FamilyTag(family, {"weights": tuple(w.tolist()),
                             "lambdas": tuple(_as_tuple(v) for v in lambdas)})
    diag_index = [i * d + i for i in range(d)]
    rho = np.zeros((d * d, d * d), dtype=complex)
    for p, lam in zip(w, lambdas):
        vec = np.zeros(d * d, dtype=complex)
        vec[diag_index] = lam
        if family == "ensemble_entangled":
            rho += p * nu.projector(vec)
        else:
            rho += p * np.diag(np.abs(vec) ** 2)
    return DensityMatrix(rho, (d, d), tag)


def bell_state() -> DensityMatrix:
    h = np.sqrt(0.5)
    return build_family("entangled_qudit", a=(h, h), b=(h, h))


def _acted_out_indices(vectors, what):
    """Distinct basis index per member, maximizing total captured weight."""
    weights = np.abs(np.array(vectors)) ** 2
    count, d = weights.shape
    if count > d:
        raise ValidationError(
            f"classical reduction needs orthogonal {what}: {count} members exceed dimension {d}"
        )
    rows, cols = linear_sum_assignment(-weights)
    out = np.empty(count, dtype=int)
    out[rows] = cols
    return out


def classical_reduction(state: DensityMatrix) -> DensityMatrix:
    """Reduce a separable or ensemble-entangled state to its classical form.

    Each member keeps a single acted-out eigenstate (d = 1) and members are
    made mutually orthogonal: member xi is sent to a distinct basis index,
    chosen to keep as much of its original weight as possible. The result
    is diagonal in the product basis and carries the same family tag with
    the reduced parameters, so reducing twice changes nothing.
    """
    tag = state.family_tag
    if tag is None:
        raise ValidationError("classical reduction needs a family tag")
    p = tag.params
    if tag.name == "separable":
        da, db = state.dims
        ia = _acted_out_indices(p["locals_a"], "local states of A")
        ib = _acted_out_indices(p["locals_b"], "local states of B")
        return build_family("separable", weights=p["weights"],
                            locals_a=[nu.ket(i, da) for i in ia],
                            locals_b=[nu.ket(j, db) for j in ib])
    if tag.name in ("ensemble_entangled", "ensemble_decohered"):
        d = state.dims[0]
        idx = _acted_out_indices(p["lambdas"], "members")
        return build_family(tag.name, weights=p["weights"],
                            lambdas=[nu.ket(i, d) for i in idx])
    raise ValidationError(
        f"classical reduction is defined for separable and ensemble states, not {tag.name!r}"
    )


# ---------------------------------------------------------------------------
# WFES and decoherence


def wfes_vector(ensemble: EnsembleDecomposition) -> np.ndarray:
    """Unnormalized ``sum_k gamma_k |psi_k>`` over a single-party ensemble."""
    if ensemble.gamma is None:
        raise ValidationError("WFES needs complex amplitudes gamma")
    if len(ensemble.locals) != 1:
        raise ValidationError("WFES is built from a single-party ensemble")
    return sum(g * v for g, v in zip(ensemble.gamma, ensemble.locals[0]))


def wfes_density(ensemble: EnsembleDecomposition) -> DensityMatrix:
    """Pure density matrix of the WFES, rescaled to unit trace.

    For nonorthogonal members ``|Psi> = sum gamma_k |psi_k>`` is not
    normalized; the raw squared norm is kept in the tag as ``norm2`` so the
    unscaled matrix ``sum gamma_k conj(gamma_k') |psi_k><psi_k'|`` is
    ``norm2 * matrix``.
    """
    psi = wfes_vector(ensemble)
    norm2 = float(np.vdot(psi, psi).real)
    if norm2 == 0.0:
        raise ValidationError("WFES amplitudes cancel to the zero vector")
    tag = FamilyTag("wfes", {"gamma": ensemble.gamma,
                             "members": tuple(_as_tuple(v) for v in ensemble.locals[0]),
                             "norm2": norm2})
    return DensityMatrix(nu.projector(psi) / norm2, ensemble.dims, tag)


def sub_decohere(varrho: DensityMatrix) -> DensityMatrix:
    """Drop the cross terms ``gamma_k gamma_k'`` of a WFES density matrix."""
    tag = varrho.family_tag
    if tag is None or tag.name != "wfes":
        raise ValidationError("sub-decoherence needs a density matrix built by wfes_density")
    gamma = np.asarray(tag.params["gamma"])
    members = [np.asarray(v) for v in tag.params["members"]]
    rho = sum(abs(g) ** 2 * nu.projector(v) for g, v in zip(gamma, members))
    out_tag = FamilyTag("sub_decohered", {"gamma": tag.params["gamma"],
                                          "members": tag.params["members"]})
    return DensityMatrix(rho, varrho.dims, out_tag)


_DECOHERED = {
    "entangled_qudit": "decohered_qudit",
    "decohered_qudit": "decohered_qudit",
    "ensemble_entangled": "ensemble_decohered",
    "ensemble_decohered": "ensemble_decohered",
}


def decohere(rho: DensityMatrix, basis=None, tol=DEFAULT) -> DensityMatrix:
    """Remove coherences in an orthonormal basis (columns of ``basis``).

    Defaults to the computational (product) basis. Decohering an entangled
    qudit in the product basis yields the matching decohered qudit.
    """
    d = rho.matrix.shape[0]
    b = np.eye(d, dtype=complex) if basis is None else nu.as_matrix(basis)
    if b.shape != (d, d):
        raise ValidationError(f"basis must be {d}x{d}, got {b.shape}")
    if np.max(np.abs(b.conj().T @ b - np.eye(d))) > tol.unitary:
        raise ValidationError("decoherence basis is not orthonormal")
    pops = np.real(np.einsum("ji,jk,ki->i", b.conj(), rho.matrix, b))
    out = (b * pops) @ b.conj().T

    tag = rho.family_tag
    name = tag.name if tag is not None else None
    if basis is None and name in _DECOHERED:
        new_tag = FamilyTag(_DECOHERED[name], dict(tag.params))
    else:
        new_tag = FamilyTag("decohered", {"source": name})
    return DensityMatrix(out, rho.dims, new_tag)


"""
Time evolution, open-system channels, consistent histories and the Wigner
function. Units have hbar = 1.
"""

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import numerics as nu
from .config import DEFAULT
from .errors import DomainError, ValidationError
from .states import DensityMatrix, PureState


# ---------------------------------------------------------------------------
# closed evolution


@dataclass(frozen=True)
class HamiltonianSpec:
    """Hamiltonian ``H`` with an optional split ``H = H0 + H1`` for the
    interaction picture."""

    H: np.ndarray
    H0: Optional[np.ndarray] = None
    H1: Optional[np.ndarray] = None

    def __post_init__(self):
        h = nu.as_matrix(self.H)
        if not nu.is_hermitian(h):
            raise ValidationError("Hamiltonian is not Hermitian")
        object.__setattr__(self, "H", h)
        if (self.H0 is None) != (self.H1 is None):
            # one part given: the other is the remainder
            h0 = h - nu.as_matrix(self.H1) if self.H0 is None else nu.as_matrix(self.H0)
            object.__setattr__(self, "H0", h0)
            object.__setattr__(self, "H1", h - h0)
        if self.H0 is not None:
            h0, h1 = nu.as_matrix(self.H0), nu.as_matrix(self.H1)
            if h0.shape != h.shape or h1.shape != h.shape:
                raise ValidationError("split parts must match H in shape")
            if not (nu.is_hermitian(h0) and nu.is_hermitian(h1)):
                raise ValidationError("split parts must be Hermitian")
            if np.max(np.abs(h0 + h1 - h)) > 1e-12 * max(1.0, float(np.max(np.abs(h)))):
                raise ValidationError("H0 + H1 does not reproduce H")
            object.__setattr__(self, "H0", h0)
            object.__setattr__(self, "H1", h1)

    @property
    def has_split(self) -> bool:
        return self.H0 is not None


def _as_hamiltonian(h) -> HamiltonianSpec:
    return h if isinstance(h, HamiltonianSpec) else HamiltonianSpec(h)


def unitary(h, t: float) -> np.ndarray:
    """``exp(-i H t)``."""
    return nu.mat_func(_as_hamiltonian(h).H, "exp", scale=-1j * t)


def evolve(state, h, t: float):
    """Apply ``exp(-iHt)`` to a pure state or density matrix.

    Returns the same kind as given. Family tags are dropped, since they
    describe how the initial state was built.
    """
    u = unitary(h, t)
    if isinstance(state, PureState):
        return PureState(u @ state.amplitudes, state.dims)
    if isinstance(state, DensityMatrix):
        return DensityMatrix(u @ state.matrix @ u.conj().T, state.dims)
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        return u @ a
    return u @ a @ u.conj().T


def liouville_rhs(rho, h) -> np.ndarray:
    """``d rho / dt = -i [H, rho]``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else nu.as_matrix(rho)
    hm = _as_hamiltonian(h).H
    return -1j * (hm @ m - m @ hm)


class PictureValues(tuple):
    __slots__ = ()

    def __new__(cls, schrodinger, heisenberg, dirac):
        return super().__new__(cls, (schrodinger, heisenberg, dirac))

    schrodinger = property(lambda self: self[0])
    heisenberg = property(lambda self: self[1])
    dirac = property(lambda self: self[2])


def expectation_in_pictures(a, psi0, h, t: float) -> PictureValues:
    """``<A>(t)`` computed in the Schrodinger, Heisenberg and interaction pictures."""
    spec = _as_hamiltonian(h)
    if not spec.has_split:
        raise ValidationError("the interaction picture needs a split H = H0 + H1")
    op = nu.as_matrix(a)
    if not nu.is_hermitian(op):
        raise ValidationError("observable is not Hermitian")
    v0 = psi0.amplitudes if isinstance(psi0, PureState) else np.asarray(psi0, dtype=complex)

    u = unitary(spec.H, t)
    psi_t = u @ v0
    schrodinger = np.vdot(psi_t, op @ psi_t).real

    a_h = u.conj().T @ op @ u
    heisenberg = np.vdot(v0, a_h @ v0).real

    u0 = unitary(spec.H0, t)
    psi_i = u0.conj().T @ psi_t
    a_i = u0.conj().T @ op @ u0
    dirac = np.vdot(psi_i, a_i @ psi_i).real
    return PictureValues(float(schrodinger), float(heisenberg), float(dirac))


# ---------------------------------------------------------------------------
# channels


@dataclass(frozen=True)
class Channel:
    kraus: tuple

    def __post_init__(self):
        ks = tuple(nu.as_matrix(k) for k in self.kraus)
        if not ks:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ks[0].shape[1]
        if any(k.shape != (ks[0].shape[0], d) for k in ks):
            raise ValidationError("Kraus operators must share one shape")
        err = float(np.max(np.abs(sum(k.conj().T @ k for k in ks) - np.eye(d))))
        if err > DEFAULT.unitary:
            raise ValidationError(f"Kraus operators are not trace preserving (error {err:.2e})")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[1]

    def then(self, other: "Channel") -> "Channel":
        """Channel applying ``self`` first and ``other`` second."""
        return Channel(tuple(k2 @ k1 for k2 in other.kraus for k1 in self.kraus))

    @classmethod
    def identity(cls, dim: int) -> "Channel":
        return cls((np.eye(dim),))

    @classmethod
    def dephasing(cls, dim: int) -> "Channel":
        """Full dephasing in the computational basis."""
        return cls(tuple(nu.projector(nu.ket(i, dim)) for i in range(dim)))


def kraus_from_dilation(u, env_dim: int, env_init: int = 0) -> Channel:
    """Kraus operators ``K_i = <i|_E U |env_init>_E`` of a system-environment unitary.

    ``u`` acts on ``S (x) E`` with the system factor first.
    """
    u = nu.as_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n) or n % env_dim:
        raise ValidationError(f"unitary of shape {u.shape} does not factor with env_dim {env_dim}")
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(n))))
    if err > DEFAULT.unitary:
        raise ValidationError(f"dilation is not unitary (error {err:.2e})")
    if not 0 <= env_init < env_dim:
        raise ValidationError("env_init out of range")
    d = n // env_dim
    u4 = u.reshape(d, env_dim, d, env_dim)
    return Channel(tuple(u4[:, i, :, env_init] for i in range(env_dim)))


def dilation_output(rho, u, env_dim: int, env_init: int = 0) -> np.ndarray:
    """``Tr_E[U (rho (x) |e><e|) U^dagger]``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else nu.as_matrix(rho)
    env = nu.projector(nu.ket(env_init, env_dim))
    joint = u @ np.kron(m, env) @ nu.as_matrix(u).conj().T
    return nu.partial_trace(joint, (m.shape[0], env_dim), 0)


def apply_channel(rho, ch: Channel):
    """``sum_i K_i rho K_i^dagger``; returns the same kind as given."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else nu.as_matrix(rho)
    if m.shape[0] != ch.dim:
        raise ValidationError("channel and state dimensions differ")
    out = sum(k @ m @ k.conj().T for k in ch.kraus)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(0.5 * (out + out.conj().T), rho.dims)
    return out


# ---------------------------------------------------------------------------
# consistent histories


@dataclass(frozen=True)
class HistoryStep:
    """One time step: optional channel, then optional unitary, then a
    projective measurement family."""

    projectors: tuple
    unitary: Optional[np.ndarray] = None
    channel: Optional[Channel] = None

    def __post_init__(self):
        ps = tuple(nu.as_matrix(p) for p in self.projectors)
        if not ps:
            raise ValidationError("a step needs at least one projector")
        d = ps[0].shape[0]
        tol = DEFAULT.projector
        if np.max(np.abs(sum(ps) - np.eye(d))) > tol:
            raise ValidationError("projectors do not sum to the identity")
        for i, p in enumerate(ps):
            for j, q in enumerate(ps):
                target = p if i == j else 0.0
                if np.max(np.abs(p @ q - target)) > tol:
                    raise ValidationError("projector family is not orthogonal and idempotent")
        object.__setattr__(self, "projectors", ps)
        if self.unitary is not None:
            u = nu.as_matrix(self.unitary)
            if np.max(np.abs(u.conj().T @ u - np.eye(d))) > DEFAULT.unitary:
                raise ValidationError("step unitary is not unitary")
            object.__setattr__(self, "unitary", u)
        if self.channel is not None and self.channel.dim != d:
            raise ValidationError("step channel dimension differs from projectors")


def basis_projectors(dim: int) -> tuple:
    return tuple(nu.projector(nu.ket(i, dim)) for i in range(dim))


@dataclass(frozen=True)
class HistorySpec:
    initial: DensityMatrix
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValidationError("a history needs at least one step")
        d = self.initial.matrix.shape[0]
        if any(s.projectors[0].shape[0] != d for s in steps):
            raise ValidationError("step dimensions differ from the initial state")
        object.__setattr__(self, "steps", steps)

    @property
    def family_sizes(self) -> tuple:
        return tuple(len(s.projectors) for s in self.steps)

    @property
    def lattice_size(self) -> int:
        return math.prod(self.family_sizes)


def _initial_factors(rho: np.ndarray) -> np.ndarray:
    """Columns ``sqrt(w_j) phi_j`` with ``rho = F F^dagger``."""
    res = nu.eigh(rho)
    keep = res.eigenvalues > DEFAULT.eig_clamp
    return res.eigenvectors[:, keep] * np.sqrt(res.eigenvalues[keep])


def _branch_vectors(spec: HistorySpec, histories) -> np.ndarray:
    """Array ``(len(histories), n_kraus_paths, d, r)`` of ``C_alpha^k F``."""
    f = _initial_factors(spec.initial.matrix)
    out = []
    for alpha in histories:
        vecs = [f]
        for step, i in zip(spec.steps, alpha):
            if spec.steps and step.channel is not None:
                vecs = [k @ v for v in vecs for k in step.channel.kraus]
            ops = step.projectors[i] if step.unitary is None else step.projectors[i] @ step.unitary
            vecs = [ops @ v for v in vecs]
        out.append(np.stack(vecs))
    return np.stack(out)


def _check_history(spec: HistorySpec, alpha) -> tuple:
    alpha = tuple(int(i) for i in alpha)
    if len(alpha) != len(spec.steps):
        raise ValidationError(f"history has {len(alpha)} outcomes for {len(spec.steps)} steps")
    for i, n in zip(alpha, spec.family_sizes):
        if not 0 <= i < n:
            raise IndexError(f"outcome {i} out of range for a family of {n} projectors")
    return alpha


def decoherence_functional(spec: HistorySpec, alpha, alpha_prime) -> complex:
    """``D(alpha, alpha') = sum_k Tr(C_alpha^k rho C_alpha'^k dagger)``.

    The index ``k`` runs over Kraus paths of any channels in the steps; for
    purely unitary steps there is a single path.
    """
    a = _check_history(spec, alpha)
    b = _check_history(spec, alpha_prime)
    va, vb = _branch_vectors(spec, [a, b])
    return complex(np.vdot(vb, va))


def history_lattice(spec: HistorySpec):
    return list(itertools.product(*(range(n) for n in spec.family_sizes)))


def decoherence_matrix(spec: HistorySpec, max_histories: int = 100_000) -> np.ndarray:
    """Full ``D`` over the lattice in lexicographic history order."""
    if spec.lattice_size > max_histories:
        raise ValidationError(f"{spec.lattice_size} histories exceed the cap {max_histories}")
    x = _branch_vectors(spec, history_lattice(spec)).reshape(spec.lattice_size, -1)
    return x.conj() @ x.T


def consistency_check(spec: HistorySpec, threshold: float = DEFAULT.consistency,
                      max_histories: int = 100_000, chunk: int = 1024) -> Tuple[bool, float]:
    """Whether every off-diagonal ``|D(alpha, alpha')|`` is at most ``threshold``.

    Returns the flag and the largest off-diagonal modulus. The Gram matrix
    is formed in row blocks so large lattices stay within memory.
    """
    if spec.lattice_size > max_histories:
        raise ValidationError(f"{spec.lattice_size} histories exceed the cap {max_histories}")
    x = _branch_vectors(spec, history_lattice(spec)).reshape(spec.lattice_size, -1)
    worst = 0.0
    for start in range(0, x.shape[0], chunk):
        block = np.abs(x[start:start + chunk].conj() @ x.T)
        rows = np.arange(block.shape[0])
        block[rows, start + rows] = 0.0
        worst = max(worst, float(block.max()))
    return worst <= threshold, worst


# ---------------------------------------------------------------------------
# Wigner function


@dataclass(frozen=True)
class WavefunctionGrid:
    samples: np.ndarray
    x0: float
    dx: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).reshape(-1)
        if s.size < 3 or self.dx <= 0:
            raise ValidationError("grid needs at least three samples and positive spacing")
        norm = float(np.sum(np.abs(s) ** 2) * self.dx)
        if abs(norm - 1.0) > DEFAULT.grid_normalization:
            raise ValidationError(f"wave function not normalized on the grid (norm {norm:.8f})")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.samples.size)

    @classmethod
    def from_function(cls, func, x_min: float = -8.0, x_max: float = 8.0, dx: float = 0.01):
        """Sample ``func`` and rescale so that ``sum |psi|^2 dx = 1``."""
        n = int(round((x_max - x_min) / dx)) + 1
        x = x_min + dx * np.arange(n)
        s = np.asarray(func(x), dtype=complex)
        s = s / math.sqrt(float(np.sum(np.abs(s) ** 2) * dx))
        return cls(s, x_min, dx)

    def at(self, x) -> np.ndarray:
        """Linear interpolation, zero outside the grid."""
        x = np.asarray(x, dtype=float)
        grid = self.x
        re = np.interp(x, grid, self.samples.real, left=0.0, right=0.0)
        im = np.interp(x, grid, self.samples.imag, left=0.0, right=0.0)
        return re + 1j * im

    def check_support(self, tol: float = DEFAULT.wigner_support) -> None:
        edge = max(abs(self.samples[0]), abs(self.samples[-1]))
        if edge >= tol:
            warnings.warn(f"wave function is {edge:.2e} at the grid edge; "
                          "the Wigner integral may be truncated", RuntimeWarning, stacklevel=3)


def gaussian(x, center: float = 0.0, momentum: float = 0.0):
    return np.pi ** -0.25 * np.exp(-0.5 * (x - center) ** 2 + 1j * momentum * x)


def odd_cat(x, separation: float = 3.0):
    return np.exp(-0.5 * (x - separation) ** 2) - np.exp(-0.5 * (x + separation) ** 2)


def _correlation(psi: WavefunctionGrid, q: float):
    """Half-offsets ``x`` (symmetric, spacing dx) and ``conj psi(q-x) psi(q+x)``."""
    n = psi.samples.size
    half = np.arange(-(n - 1), n) * psi.dx
    return half, np.conj(psi.at(q - half)) * psi.at(q + half)


def wigner_grid(psi: WavefunctionGrid, q, p) -> np.ndarray:
    """Wigner function on the outer grid ``q x p`` (shape ``(len(q), len(p))``).

    ``W(q, p) = (1/pi) int dx exp(-2ipx) conj psi(q-x) psi(q+x)`` with the
    trapezoid rule on a symmetric offset grid of the same spacing as the
    wave function.
    """
    psi.check_support()
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    out = np.empty((q.size, p.size))
    weights = None
    for i, qi in enumerate(q):
        half, corr = _correlation(psi, qi)
        if weights is None:
            weights = np.full(half.size, psi.dx)
            weights[[0, -1]] *= 0.5
            phase = np.exp(-2j * np.outer(p, half))
        vals = phase @ (corr * weights) / np.pi
        imag = float(np.max(np.abs(vals.imag)))
        if imag > DEFAULT.wigner_imag:
            raise DomainError(f"Wigner integral has imaginary part {imag:.2e}")
        out[i] = vals.real
    return out


def wigner(psi: WavefunctionGrid, q: float, p: float) -> float:
    return float(wigner_grid(psi, q, p)[0, 0])


def momentum_density(psi: WavefunctionGrid, p) -> np.ndarray:
    """``|phi(p)|^2`` with ``phi(p) = (2 pi)^(-1/2) int psi(x) exp(-ipx) dx``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    w = np.full(psi.samples.size, psi.dx)
    w[[0, -1]] *= 0.5
    phi = np.exp(-1j * np.outer(p, psi.x)) @ (psi.samples * w) / math.sqrt(2 * math.pi)
    return np.abs(phi) ** 2

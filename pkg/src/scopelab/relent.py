"""
Relative entropy of entanglement of two-qubit states.

The separable set is parameterized as mixtures of ``K`` product pure
states. Each local qubit is given by Bloch angles ``(theta, phi)`` and the
mixture weights by normalized squares of free amplitudes, so a term can be
switched off exactly. The search is derivative-free:

1. random starts, each improved by one block-coordinate sweep (a short
   Nelder-Mead run per product term with the other terms frozen);
2. the best start is polished by full-dimensional adaptive Nelder-Mead,
   restarted with a simplex sized to the last displacement until the
   budget is spent or two successive restarts stop improving.

The minimizer is an explicit separable state, so the value is a certified
upper bound on the true infimum.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nu
from .config import DEFAULT
from .errors import ValidationError
from .optimize import nelder_mead
from .states import DensityMatrix

_LN2 = math.log(2.0)
_INFEASIBLE = 1e3
_BLOCK_STEP = np.array([0.6, 1.2, 0.6, 1.2, 0.5])


@dataclass(frozen=True)
class RelativeEntropyResult:
    value: float          # bits
    sigma: np.ndarray     # separable state achieving ``value``
    converged: bool
    evaluations: int


def _product_vector(t1, p1, t2, p2) -> np.ndarray:
    a0, a1 = math.cos(0.5 * t1), cmath.exp(1j * p1) * math.sin(0.5 * t1)
    b0, b1 = math.cos(0.5 * t2), cmath.exp(1j * p2) * math.sin(0.5 * t2)
    return np.array([a0 * b0, a0 * b1, a1 * b0, a1 * b1])


def separable_from_params(x: np.ndarray, k: int) -> np.ndarray:
    """Mixture of ``k`` product states from ``4k`` angles and ``k`` weight amplitudes."""
    x = np.asarray(x, dtype=float)
    half = 0.5 * x[: 4 * k].reshape(k, 4)
    c, s = np.cos(half), np.sin(half)
    phase = np.exp(1j * x[1: 4 * k: 2].reshape(k, 2))
    a1 = phase[:, 0] * s[:, 0]
    b1 = phase[:, 1] * s[:, 2]
    v = np.empty((k, 4), dtype=complex)
    v[:, 0] = c[:, 0] * c[:, 2]
    v[:, 1] = c[:, 0] * b1
    v[:, 2] = a1 * c[:, 2]
    v[:, 3] = a1 * b1
    z = x[4 * k:] ** 2
    total = z.sum()
    w = z / total if total > 0 else np.full(k, 1.0 / k)
    return (v.T * w) @ v.conj()


def _relative_entropy_fast(rho, sigma, neg_entropy):
    """``Tr(rho log2 rho) - Tr(rho log2 sigma)`` using LAPACK for speed."""
    lam, vec = np.linalg.eigh(sigma)
    overlap = (vec.conj() * (rho @ vec)).sum(axis=0).real
    null = lam <= DEFAULT.log_floor
    if null.any():
        if (overlap[null] > 1e-14).any():
            return _INFEASIBLE
        lam = np.where(null, 1.0, lam)
    return neg_entropy - float(overlap @ np.log(lam)) / _LN2


def relative_entropy(rho, sigma, tol=DEFAULT) -> float:
    """``S(rho || sigma)`` in bits via the package eigensolver; inf when
    ``rho`` is not supported inside ``sigma``."""
    r, s = nu.as_matrix(rho), nu.as_matrix(sigma)
    lam_r = np.clip(nu.eigvalsh(r, tol), 0.0, None)
    lam_r = lam_r[lam_r > 0]
    res = nu.eigh(0.5 * (s + s.conj().T), tol)
    overlap = np.real(np.einsum("ji,jk,ki->i", res.eigenvectors.conj(), r, res.eigenvectors))
    lam_s = res.eigenvalues
    null = lam_s <= tol.log_floor
    if np.any(null & (overlap > 1e-14)):
        return float("inf")
    lam_s = np.where(null, 1.0, lam_s)
    value = float(np.sum(lam_r * np.log2(lam_r))) - float(np.sum(overlap * np.log2(lam_s)))
    return max(0.0, value)


def _block_sweep(m, neg_entropy, x, k, per_block, counter):
    """One pass of per-term Nelder-Mead; ``counter`` is a one-item evaluation tally."""
    ang = x[: 4 * k].reshape(k, 4)
    z = x[4 * k:] ** 2
    terms = [z[i] * np.outer(v, v.conj()) for i, v in enumerate(_product_vector(*a) for a in ang)]
    for j in range(k):
        rest = sum(t for i, t in enumerate(terms) if i != j)
        z_rest = z.sum() - z[j]

        def sub(y):
            counter[0] += 1
            zj = y[4] * y[4]
            total = z_rest + zj
            if total <= 0:
                return _INFEASIBLE
            v = _product_vector(y[0], y[1], y[2], y[3])
            return _relative_entropy_fast(m, (rest + zj * np.outer(v, v.conj())) / total,
                                          neg_entropy)

        idx = np.r_[4 * j: 4 * j + 4, 4 * k + j]
        start = sub(x[idx])
        res = nelder_mead(sub, x[idx], step=_BLOCK_STEP, max_evals=per_block)
        if res.fun <= start:
            x[idx] = res.x
            z[j] = res.x[4] ** 2
            v = _product_vector(*res.x[:4])
            terms[j] = z[j] * np.outer(v, v.conj())
    return x


def relative_entropy_of_entanglement(rho, budget: int = 20000, restarts: int = 16,
                                     n_products: int = 8, seed: int = 0,
                                     block_evals: int = 25,
                                     polish_evals: int = 3000) -> RelativeEntropyResult:
    """Minimize ``S(rho || sigma)`` over mixtures of ``n_products`` product states.

    Parameters
    ----------
    rho : DensityMatrix or array_like
        Two-qubit state.
    budget : int
        Cap on objective evaluations over the whole search.
    restarts : int
        Number of random starting points.
    n_products : int
        Product terms ``K`` in the separable ansatz.
    seed : int
        Seed for the starting points; results are deterministic.
    block_evals : int
        Evaluations per product term in the sweep applied to each start.
    polish_evals : int
        Evaluations per full-dimensional polishing run.

    Returns
    -------
    RelativeEntropyResult
        ``value`` is recomputed from ``sigma`` with the package eigensolver.
        ``converged`` is False when the budget ran out while the polish was
        still improving.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else nu.as_matrix(rho)
    if m.shape != (4, 4):
        raise ValidationError("relative entropy of entanglement is implemented for 2x2 states")
    k = int(n_products)
    lam = np.clip(np.linalg.eigvalsh(m), 0.0, None)
    lam = lam[lam > 0]
    neg_entropy = float(np.sum(lam * np.log2(lam)))

    rng = np.random.default_rng(seed)
    counter = [0]

    def objective(x):
        counter[0] += 1
        return _relative_entropy_fast(m, separable_from_params(x, k), neg_entropy)

    best_x, best_f = None, np.inf
    for _ in range(restarts):
        if counter[0] >= budget:
            break
        x = np.concatenate([
            (rng.uniform(size=(k, 4)) * np.array([np.pi, 2 * np.pi, np.pi, 2 * np.pi])).ravel(),
            rng.uniform(0.5, 1.5, size=k),
        ])
        x = _block_sweep(m, neg_entropy, x, k, block_evals, counter)
        f = objective(x)
        if f < best_f:
            best_x, best_f = x, f

    x, current = best_x, best_f
    step = 0.05
    converged = False
    stalls = 0
    while counter[0] < budget:
        res = nelder_mead(objective, x, step=step, adaptive=True, xatol=1e-13, fatol=1e-16,
                          max_evals=min(polish_evals, budget - counter[0]))
        improvement = current - res.fun
        if improvement > 0:
            step = min(0.5, max(2.0 * float(np.max(np.abs(res.x - x))), 1e-8))
            x, current = res.x, res.fun
        else:
            step = max(0.5 * step, 1e-8)
        stalls = stalls + 1 if improvement <= 1e-14 else 0
        if stalls == 2:
            converged = True
            break

    sigma = separable_from_params(x, k)
    return RelativeEntropyResult(relative_entropy(m, sigma), sigma, converged, counter[0])

"""Permutation-entangled states of n x n systems and their sum identities."""

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .config import DEFAULT
from .errors import ValidationError
from .measures import degree_of_superposition

MAX_N = 7


@dataclass(frozen=True)
class PermutationStateReport:
    permutation: Tuple[int, ...]   # 0-based sigma: branch i pairs a_i with b_sigma(i)
    alpha: float
    beta: float
    entanglement: float
    branch_coeffs: np.ndarray      # normalized a_i b_sigma(i) / sqrt(beta)


@dataclass(frozen=True)
class IdentityReport:
    n: int
    sum_beta_residual: float
    sum_alpha_residual: float
    sum_alpha_over_E_residual: float
    trials: int = 1
    sum_beta: float = float("nan")
    sum_alpha: float = float("nan")
    sum_alpha_over_E: float = float("nan")

    @property
    def max_abs_residual(self) -> float:
        return max(self.sum_beta_residual, self.sum_alpha_residual, self.sum_alpha_over_E_residual)


def _moduli(v, name, tol=DEFAULT) -> np.ndarray:
    c = np.abs(np.asarray(v, dtype=complex).reshape(-1))
    if c.size == 0:
        raise ValidationError(f"{name} is empty")
    if abs(math.fsum(c ** 2) - 1.0) > tol.coeff_normalization:
        raise ValidationError(f"{name} is not normalized")
    return c


def _report(a, b, perm) -> PermutationStateReport:
    c = a * b[list(perm)]
    beta = math.fsum(c ** 2)
    alpha = math.fsum(c[i] * c[j] for i in range(c.size) for j in range(i + 1, c.size))
    e = alpha / beta if beta > 0 else 0.0
    branch = c / math.sqrt(beta) if beta > 0 else c
    return PermutationStateReport(tuple(perm), alpha, beta, e, branch)


def enumerate_perm_states(a, b, max_n: int = MAX_N) -> List[PermutationStateReport]:
    """One report per permutation of ``range(n)``, in lexicographic order."""
    a, b = _moduli(a, "a"), _moduli(b, "b")
    if a.size != b.size:
        raise ValidationError("a and b must have the same length")
    if a.size > max_n:
        raise ValidationError(f"n = {a.size} exceeds the enumeration cap {max_n}")
    return [_report(a, b, p) for p in itertools.permutations(range(a.size))]


def verify_sum_identities(a, b, max_n: int = MAX_N) -> IdentityReport:
    """Residuals of ``sum beta = (n-1)!``, ``sum alpha = 2 (n-2)! eps_A eps_B``
    and ``sum alpha/E = sum beta``.

    Where ``E = 0`` (a vanishing numerator) the term ``alpha/E`` is replaced by
    its limit ``beta``.
    """
    reports = enumerate_perm_states(a, b, max_n)
    n = len(reports[0].permutation)
    sum_beta = math.fsum(sorted(r.beta for r in reports))
    sum_alpha = math.fsum(sorted(r.alpha for r in reports))
    sum_ratio = math.fsum(sorted(r.alpha / r.entanglement if r.entanglement > 0 else r.beta
                                 for r in reports))
    eps = degree_of_superposition(a) * degree_of_superposition(b)
    target_alpha = 2.0 * math.factorial(n - 2) * eps if n >= 2 else 0.0
    return IdentityReport(
        n=n,
        sum_beta_residual=abs(sum_beta - math.factorial(n - 1)),
        sum_alpha_residual=abs(sum_alpha - target_alpha),
        sum_alpha_over_E_residual=abs(sum_ratio - sum_beta),
        sum_beta=sum_beta,
        sum_alpha=sum_alpha,
        sum_alpha_over_E=sum_ratio,
    )


def random_coefficient_pairs(n: int, trials: int, seed: int = 0):
    """``trials`` pairs of normalized positive n-vectors from one seeded stream."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        a, b = rng.uniform(0.05, 1.0, size=(2, n))
        yield a / np.linalg.norm(a), b / np.linalg.norm(b)


def random_identity_check(n: int, trials: int = 100, seed: int = 0) -> IdentityReport:
    """Worst residuals of :func:`verify_sum_identities` over random positive coefficients."""
    worst = [0.0, 0.0, 0.0]
    for a, b in random_coefficient_pairs(n, trials, seed):
        rep = verify_sum_identities(a, b)
        worst = [max(w, r) for w, r in zip(worst, (rep.sum_beta_residual, rep.sum_alpha_residual,
                                                  rep.sum_alpha_over_E_residual))]
    return IdentityReport(n, *worst, trials=trials)


@dataclass(frozen=True)
class GHZReport:
    pattern: Tuple[int, ...]   # index used by each party in the first branch
    coeffs: Tuple[float, float]
    entanglement: float


def ghz_family(party_coeffs) -> Tuple[List[GHZReport], float]:
    """Two-branch states ``c1 |s_1 ... s_m> + c2 |~s_1 ... ~s_m>`` over qubit parties.

    The first party is fixed to index 0 in the first branch, leaving
    ``2^(m-1)`` patterns. Returns the reports and the reduced entanglement
    ``(sum_k 1/E_k)^-1``, which is 0 when any party has a zero coefficient.
    """
    parties = [_moduli(p, f"party {i}") for i, p in enumerate(party_coeffs)]
    if len(parties) < 2:
        raise ValidationError("at least two parties are required")
    if any(p.size != 2 for p in parties):
        raise ValidationError("every party must be a qubit (two coefficients)")
    reports = []
    for tail in itertools.product((0, 1), repeat=len(parties) - 1):
        pattern = (0,) + tail
        c1 = math.prod(p[s] for p, s in zip(parties, pattern))
        c2 = math.prod(p[1 - s] for p, s in zip(parties, pattern))
        norm = c1 * c1 + c2 * c2
        e = c1 * c2 / norm if norm > 0 else 0.0
        reports.append(GHZReport(pattern, (c1, c2), e))
    if any(r.entanglement == 0.0 for r in reports):
        return reports, 0.0
    return reports, 1.0 / math.fsum(1.0 / r.entanglement for r in reports)


def mixture_identity(e_d: float, e_c: float, p1: float, p2: float, tol: float = 1e-12):
    """Both sides of ``p1 E_d + p2 E_c = (E_d + E_c) u_c^2 + E_dagger u_0^2``.

    Here ``u = sqrt(p)``, ``u_c = (u1 E_d + u2 E_c) / (E_d + E_c)``,
    ``u_0 = |u1 - u2|`` and ``E_dagger = E_d E_c / (E_d + E_c)``.
    """
    if min(p1, p2) < 0 or abs(p1 + p2 - 1.0) > tol:
        raise ValidationError("p1 and p2 must be nonnegative and sum to 1")
    if e_d < 0 or e_c < 0:
        raise ValidationError("degrees of entanglement are nonnegative")
    total = e_d + e_c
    if total == 0:
        raise ValidationError("E_d and E_c cannot both vanish")
    u1, u2 = math.sqrt(p1), math.sqrt(p2)
    u_c = (u1 * e_d + u2 * e_c) / total
    u_0 = abs(u1 - u2)
    lhs = p1 * e_d + p2 * e_c
    rhs = total * u_c * u_c + (e_d * e_c / total) * u_0 * u_0
    return lhs, rhs

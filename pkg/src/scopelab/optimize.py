"""Budgeted Nelder-Mead simplex minimizer."""

from dataclasses import dataclass

import numpy as np


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    evaluations: int
    converged: bool


def nelder_mead(func, x0, step=0.5, max_evals=1000, xatol=1e-10, fatol=1e-14,
                adaptive=False):
    """Minimize ``func`` from ``x0`` with the Nelder-Mead simplex method.

    Parameters
    ----------
    func : callable
        Objective of a 1-d float array.
    x0 : array_like
        Starting point.
    step : float or array_like
        Edge length of the initial simplex along each coordinate axis.
    max_evals : int
        Hard cap on objective evaluations.
    xatol, fatol : float
        Stop once the simplex diameter and the spread of function values
        both fall under these absolute tolerances.
    adaptive : bool
        Use dimension-dependent coefficients (Gao and Han), which behave
        better above roughly ten variables.

    Returns
    -------
    SimplexResult
        ``converged`` is False if the evaluation budget ran out first.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if adaptive and n > 1:
        rho, chi, psi, sigma = 1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2 * n), 1.0 - 1.0 / n
    else:
        rho, chi, psi, sigma = 1.0, 2.0, 0.5, 0.5

    steps = np.broadcast_to(np.asarray(step, dtype=float), (n,))
    sim = np.empty((n + 1, n))
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += steps[i]
    fs = np.array([func(p) for p in sim])
    evals = n + 1

    converged = False
    while evals < max_evals:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if (np.max(np.abs(sim[1:] - sim[0])) <= xatol
                and np.max(np.abs(fs[1:] - fs[0])) <= fatol):
            converged = True
            break

        centroid = sim[:-1].mean(axis=0)
        xr = centroid + rho * (centroid - sim[-1])
        fr = func(xr)
        evals += 1
        if fr < fs[0]:
            xe = centroid + rho * chi * (centroid - sim[-1])
            fe = func(xe)
            evals += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + psi * rho * (centroid - sim[-1])
                fc = func(xc)
                evals += 1
                accept = fc <= fr
            else:
                xc = centroid - psi * (centroid - sim[-1])
                fc = func(xc)
                evals += 1
                accept = fc < fs[-1]
            if accept:
                sim[-1], fs[-1] = xc, fc
            else:
                # shrink toward the best vertex
                for i in range(1, n + 1):
                    sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                    fs[i] = func(sim[i])
                evals += n

    best = int(np.argmin(fs))
    return SimplexResult(sim[best].copy(), float(fs[best]), evals, converged)

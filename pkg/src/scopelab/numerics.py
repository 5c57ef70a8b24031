"""
Dense complex linear algebra for small quantum-state matrices.

Matrices are plain ``numpy`` arrays. Subsystem structure is passed
explicitly as a ``dims`` sequence whose product equals the matrix size.
The Hermitian eigensolver is a cyclic complex Jacobi iteration; the SVD is
derived from it, so everything downstream runs on one deterministic solver.
"""

from typing import NamedTuple, Sequence

import numpy as np

from .config import DEFAULT
from .errors import ConvergenceError, DomainError, HermitianError, ValidationError


class EigenResult(NamedTuple):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # columns


class SVDResult(NamedTuple):
    singular_values: np.ndarray  # descending
    left_vectors: np.ndarray
    right_vectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


def check_dims(dims: Sequence[int], size: int) -> tuple:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != size:
        raise ValidationError(f"product of dims {dims} != {size}")
    return dims


def hermiticity_violation(a) -> float:
    """Max |A_ij - conj(A_ji)| for a square matrix."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, tol: float = DEFAULT.hermitian) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return hermiticity_violation(a) <= tol * scale


def _require_hermitian(a: np.ndarray, tol: float) -> None:
    if a.shape[0] != a.shape[1]:
        raise HermitianError(f"matrix is not square: {a.shape}")
    scale = float(np.max(np.abs(a)))
    viol = hermiticity_violation(a)
    if viol > tol * scale:
        raise HermitianError(
            f"matrix is not Hermitian: max |A - A^H| = {viol:.3e} "
            f"exceeds {tol:.1e} * max|A| = {tol * scale:.3e}"
        )


def eigh(a, tol=DEFAULT) -> EigenResult:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each off-diagonal pair (p, q) is annihilated by a 2x2 unitary
    ``G = diag(1, exp(-i phi)) @ R(theta)``: the phase factor makes the pivot
    block real symmetric, then a classical real Jacobi rotation zeroes it.

    Returns eigenvalues in ascending order and the matching eigenvectors as
    the columns of a unitary matrix.

    Raises
    ------
    HermitianError
        If ``a`` is not Hermitian to ``tol.hermitian`` relative precision.
    ConvergenceError
        If off-diagonal mass persists after ``tol.jacobi_max_sweeps`` sweeps.
    """
    a = as_matrix(a)
    _require_hermitian(a, tol.hermitian)
    n = a.shape[0]
    # symmetrize to remove the tolerated asymmetry, then work at unit scale so
    # tiny or huge entries cannot under/overflow inside the rotations
    w = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = float(np.max(np.abs(w)))
    if scale > 0.0:
        # real division: complex division by a subnormal scale overflows
        w = w.real / scale + 1j * (w.imag / scale)
    threshold = tol.jacobi_offdiag

    if n > 1:
        iu = np.triu_indices(n, 1)
        for _ in range(tol.jacobi_max_sweeps):
            if np.max(np.abs(w[iu])) <= threshold:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = w[p, q]
                    mod = abs(apq)
                    if mod <= threshold:
                        continue
                    phase = apq / mod
                    app = w[p, p].real
                    aqq = w[q, q].real
                    theta = (aqq - app) / (2.0 * mod)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                    g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                    cols = [p, q]
                    w[:, cols] = w[:, cols] @ g
                    w[cols, :] = g.conj().T @ w[cols, :]
                    w[p, q] = w[q, p] = 0.0
                    w[p, p] = w[p, p].real
                    w[q, q] = w[q, q].real
                    v[:, cols] = v[:, cols] @ g
        else:
            if np.max(np.abs(w[iu])) > threshold:
                raise ConvergenceError(
                    f"Jacobi iteration did not converge in {tol.jacobi_max_sweeps} sweeps"
                )

    vals = np.real(np.diag(w)) * (scale if scale > 0.0 else 1.0)
    order = np.argsort(vals, kind="stable")
    return EigenResult(vals[order], v[:, order])


def eigvalsh(a, tol=DEFAULT) -> np.ndarray:
    return eigh(a, tol).eigenvalues


def _complete_orthonormal(u: np.ndarray, k: int) -> np.ndarray:
    """Keep the first k columns of u (orthonormal) and fill the rest."""
    m, ncols = u.shape
    basis = [u[:, j] for j in range(k)]
    candidates = iter(np.eye(m, dtype=complex).T)
    while len(basis) < ncols:
        e = next(candidates)
        for b in basis:
            e = e - np.vdot(b, e) * b
        # second pass for numerical orthogonality
        for b in basis:
            e = e - np.vdot(b, e) * b
        nrm = np.linalg.norm(e)
        if nrm > 1e-8:
            basis.append(e / nrm)
    return np.column_stack(basis)


def svd(a, tol=DEFAULT) -> SVDResult:
    """Full SVD ``A = U diag(s) V^H`` built from the eigenvectors of ``A^H A``.

    Singular values are taken as ``|A v|`` rather than ``sqrt(eig)`` so that
    small values keep absolute accuracy.
    """
    a = as_matrix(a)
    m, n = a.shape
    res = eigh(a.conj().T @ a, tol)
    vecs = res.eigenvectors[:, ::-1]
    av = a @ vecs
    sv = np.linalg.norm(av, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    vecs = vecs[:, order]
    av = av[:, order]

    k = min(m, n)
    u = np.zeros((m, m), dtype=complex)
    rank = 0
    for j in range(k):
        if sv[j] < tol.svd_null:
            break
        col = av[:, j] / sv[j]
        for i in range(rank):
            col = col - np.vdot(u[:, i], col) * u[:, i]
        u[:, j] = col / np.linalg.norm(col)
        rank += 1
    u = _complete_orthonormal(u, rank)
    s = sv[:k].copy()
    return SVDResult(s, u, vecs)


def tensor_product(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not mats:
        raise ValidationError("tensor_product needs at least one operand")
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` may be an int or an iterable of subsystem indices; kept
    subsystems appear in ascending index order in the result.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError("partial_trace requires a square matrix")
    dims = check_dims(dims, rho.shape[0])
    keep = {keep} if isinstance(keep, (int, np.integer)) else set(keep)
    if not keep:
        raise ValidationError("keep must name at least one subsystem")
    bad = [k for k in keep if not 0 <= k < len(dims)]
    if bad:
        raise IndexError(f"subsystem index {bad[0]} out of range for dims {dims}")

    nsys = len(dims)
    t = rho.reshape(dims + dims)
    # trace from the highest index down so lower axis numbers stay valid
    current = nsys
    for k in sorted(set(range(nsys)) - keep, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + current)
        current -= 1
    d = int(np.prod([dims[k] for k in sorted(keep)]))
    return t.reshape(d, d)


def partial_transpose(rho, dims: Sequence[int], party: int) -> np.ndarray:
    rho = as_matrix(rho)
    if dims is None:
        raise ValidationError("partial_transpose requires subsystem dims")
    dims = check_dims(dims, rho.shape[0])
    if not 0 <= party < len(dims):
        raise IndexError(f"party {party} out of range for dims {dims}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = np.swapaxes(t, party, party + n)
    return t.reshape(rho.shape)


def trace_norm(a, tol=DEFAULT) -> float:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValidationError("trace_norm requires a square matrix")
    if is_hermitian(a, tol.hermitian):
        return float(np.sum(np.abs(eigh(a, tol).eigenvalues)))
    return float(np.sum(svd(a, tol).singular_values))


def mat_func(a, f: str, base="e", scale: complex = 1.0, support: bool = False,
             tol=DEFAULT) -> np.ndarray:
    """Apply ``exp``, ``log`` or ``sqrt`` to a Hermitian matrix spectrally.

    ``exp`` evaluates ``exp(scale * A)``; with ``scale = -1j * t`` this is
    the propagator generated by ``A``. ``log`` honours ``base`` (``"e"`` or
    ``2``). For ``log`` and ``sqrt`` eigenvalues down to ``-tol.eig_clamp``
    are clamped to zero. A vanishing eigenvalue makes ``log`` undefined
    unless ``support=True``, in which case the logarithm is taken on the
    support and the kernel maps to zero.
    """
    res = eigh(a, tol)
    lam, vec = res.eigenvalues, res.eigenvectors
    if f == "exp":
        if base not in ("e", np.e):
            scale = scale * np.log(float(base))
        vals = np.exp(scale * lam)
    elif f in ("log", "sqrt"):
        if np.any(lam < -tol.eig_clamp):
            raise DomainError(f"{f} of a matrix with negative eigenvalue {lam.min():.3e}")
        lam = np.clip(lam, 0.0, None)
        if f == "sqrt":
            vals = np.sqrt(lam)
        else:
            small = lam < tol.log_floor
            if np.any(small) and not support:
                raise DomainError(
                    "log of a rank-deficient matrix; pass support=True to restrict to the support"
                )
            vals = np.zeros_like(lam)
            vals[~small] = np.log(lam[~small])
            if base == 2:
                vals = vals / np.log(2.0)
            elif base not in ("e", np.e):
                vals = vals / np.log(float(base))
    else:
        raise ValidationError(f"unknown matrix function {f!r}")
    return (vec * vals) @ vec.conj().T


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())

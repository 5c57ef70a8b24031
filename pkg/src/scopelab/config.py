"""Numerical tolerances shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12          # relative to max |A_ij|
    normalization: float = 1e-12
    coeff_normalization: float = 1e-9  # degree-of-superposition inputs
    trace: float = 1e-12
    psd: float = 1e-10
    projector: float = 1e-10
    unitary: float = 1e-10
    jacobi_offdiag: float = 1e-13     # relative to max |A_ij|
    jacobi_max_sweeps: int = 100
    svd_null: float = 1e-12
    eig_clamp: float = 1e-12          # eigenvalues above -this are clamped to 0 for log/sqrt
    log_floor: float = 1e-300
    consistency: float = 1e-8
    purity: float = 1e-9
    wigner_support: float = 1e-8
    wigner_imag: float = 1e-8
    grid_normalization: float = 1e-6


DEFAULT = Tolerances()

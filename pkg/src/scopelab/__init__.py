"""Superposition, entanglement and decoherence measures for small quantum systems."""

from .errors import (ConvergenceError, DomainError, GeometryError, HermitianError, ScopeLabError,
                     ValidationError)
from .states import (DensityMatrix, EnsembleDecomposition, FamilyTag, PureState,
                     ScopeDecomposition, build_family)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DensityMatrix",
    "DomainError",
    "EnsembleDecomposition",
    "FamilyTag",
    "GeometryError",
    "HermitianError",
    "PureState",
    "ScopeDecomposition",
    "ScopeLabError",
    "ValidationError",
    "build_family",
]

class ScopeLabError(Exception):
    """Base class for all package errors."""


class ValidationError(ScopeLabError, ValueError):
    """An input violates a documented invariant."""


class HermitianError(ValidationError):
    pass


class DomainError(ScopeLabError, ValueError):
    """A matrix function was asked for a value outside its domain."""


class ConvergenceError(ScopeLabError, RuntimeError):
    pass


class GeometryError(ScopeLabError, ValueError):
    """Distances cannot be realized by a point set in Euclidean space."""

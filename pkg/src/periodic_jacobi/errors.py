"""Exception types raised by the library."""


class JacobiError(Exception):
    """Base class for all library errors."""


class ValidationError(JacobiError, ValueError):
    """Input data violates a precondition (bad period, non-positive a_n, ...)."""


class NumericalError(JacobiError, RuntimeError):
    """A numerical procedure failed one of its built-in consistency checks."""


class EdgeSingularityError(NumericalError):
    """Evaluation requested at (or too close to) a square-root branch point."""


class InconsistentPolynomialsError(ValidationError):
    """A polynomial pair cannot come from any periodic Jacobi matrix."""

"""Exception types raised by the reactor dynamics code."""


class ReactorError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ReactorError):
    """State left the domain of the kinetic rate function.

    Raised when 1 + beta*theta <= 0, or when (1 - alpha) < 0 with a
    non-integer reaction order (fractional power of a negative number).
    """


class SingularityError(ReactorError):
    """Rate derivative is singular, e.g. d(phi)/d(alpha) at alpha=1 with n<1."""


class NoConvergenceError(ReactorError):
    """Iterative solver exhausted its iteration budget."""


class InsufficientDataError(ReactorError):
    """Series too short for the requested analysis."""


class SamePredicateError(ReactorError):
    """Bisection endpoints evaluate to the same predicate value."""


class DegenerateTangentError(ReactorError):
    """Tangent vector collapsed to zero norm during Lyapunov accumulation."""

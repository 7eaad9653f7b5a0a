"""Exception types. Numeric failures are always raised, never silenced."""


class TsfpError(Exception):
    """Base class for all package errors."""


class DomainError(TsfpError, ValueError):
    """An argument violates a documented precondition."""


class QuadratureError(TsfpError, ArithmeticError):
    """Adaptive quadrature failed to converge within the node cap."""


class RootFindError(TsfpError, ArithmeticError):
    """Numerical inversion could not certify or reach the requested root."""


class NumericOverflowError(TsfpError, OverflowError):
    """An intermediate quantity left the representable double range."""

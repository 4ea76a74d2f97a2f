"""Exception hierarchy shared by the library and the CLI."""


class AnimcError(Exception):
    """Base class for all library errors."""


class ValidationError(AnimcError, ValueError):
    """Input data violates a structural requirement."""


class DimensionError(AnimcError, ValueError):
    """Matrix shapes do not conform."""


class SolverError(AnimcError, ArithmeticError):
    """A linear system stayed singular after the ridge retry."""


class NumericError(AnimcError, ArithmeticError):
    """A non-finite value appeared during optimization."""

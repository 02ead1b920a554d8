"""Exception hierarchy shared across the package."""


class DpsqError(Exception):
    """Base class for all errors raised by this package."""


class StabilityError(DpsqError, ValueError):
    """The offered load is at or above the stability boundary."""


class NumericError(DpsqError, RuntimeError):
    """A linear-algebra step failed its conditioning or residual guard."""


class ConvergenceError(NumericError):
    """An iterative scheme did not reach its tolerance within the budget."""


class InstanceFormatError(DpsqError, ValueError):
    """An instance file could not be parsed or failed field validation."""

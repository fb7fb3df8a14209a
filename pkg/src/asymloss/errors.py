"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside a function's mathematical domain."""


class RangeError(OverflowError):
    """A result (or required intermediate) is not representable in float64."""


class NumericError(RuntimeError):
    """A numerical routine stopped short of its accuracy target.

    ``achieved`` carries the error estimate the routine could reach, when
    one is available, so callers can decide whether to accept anyway.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CrossCheckError(RuntimeError):
    """Two independent evaluation routes for the same quantity disagreed."""


class InsufficientDataError(ValueError):
    """Too few observations for the requested fit."""


class DegenerateDistributionError(ValueError):
    """The data carry no spread, so no error density can be fitted."""

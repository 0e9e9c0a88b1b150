"""Exception types shared across the package."""


class VgratioError(Exception):
    """Base class for all package errors."""


class ParameterError(VgratioError, ValueError):
    """A distribution or control parameter violates its constraint."""


class DomainError(VgratioError, ValueError):
    """An evaluation point lies outside the supported domain."""


class PoleError(DomainError):
    """A function was requested at one of its poles."""


class DivergenceError(DomainError):
    """A series or limit diverges at the requested point."""


class OriginSingularityError(DomainError):
    """Density requested at the origin where it is unbounded (shape <= 0)."""


class UndefinedMeanError(DomainError):
    """The mean (|k| = 1 moment) of the ratio distribution does not exist."""


class MomentRangeError(DomainError):
    """Moment order outside the interval where the moment is finite."""


class BudgetExceededError(VgratioError):
    """Series truncation budget exhausted; carries the partial result."""

    def __init__(self, message, value=float("nan"), err_estimate=float("inf"), terms=0):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate
        self.terms = terms

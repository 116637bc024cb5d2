"""Exception types shared across the package."""


class HeckeDensityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HeckeDensityError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class CapacityError(HeckeDensityError):
    """A request would exceed the configured sieve / norm budget.

    ``required`` carries the norm limit the request would have needed.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class AccuracyError(HeckeDensityError, ArithmeticError):
    """A numerical method failed to reach its target accuracy."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class UnsupportedFunctionError(HeckeDensityError, TypeError):
    """The operation is not defined for this kind of test function."""


class ConsistencyError(HeckeDensityError, AssertionError):
    """Two independent evaluations of the same quantity disagree."""

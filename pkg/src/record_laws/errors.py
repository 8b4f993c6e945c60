"""Exception hierarchy shared by every module."""


class RecordLawsError(Exception):
    """Base class for all package errors."""


class DomainError(RecordLawsError, ValueError):
    """A quantity is undefined at the requested point (zero denominator, F = 1, ...)."""


class TableFormatError(RecordLawsError, ValueError):
    """A tabulated pmf file could not be parsed or failed validation."""


class StateError(RecordLawsError):
    """An operation needs a complete record trace but got a censored one."""


class NumericError(RecordLawsError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    ``estimate`` and ``error_estimate`` hold the best value found so far.
    """

    def __init__(self, message, estimate=float("nan"), error_estimate=float("inf"), level=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
        self.level = level


class StatisticsError(RecordLawsError, ValueError):
    """Not enough data for a goodness-of-fit comparison."""

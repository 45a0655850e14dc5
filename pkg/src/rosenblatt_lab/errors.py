"""Exception and warning types shared across the package."""


class RosenblattError(Exception):
    """Base class for package errors."""


class DomainError(RosenblattError, ValueError):
    """An argument lies outside the region where a quantity is defined."""


class RangeError(RosenblattError, ValueError):
    """An integer or probability argument is out of its allowed range."""


class SizeError(RosenblattError, ValueError):
    """A sample or enumeration is too small or too large."""


class BudgetError(RosenblattError):
    """The requested accuracy cannot be met within the sample budget."""


class ConvergenceWarning(UserWarning):
    """A numerical estimate is less accurate than its nominal target."""


class NormalizationWarning(UserWarning):
    """Simulated paths needed a large empirical rescale."""

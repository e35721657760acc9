"""Exception hierarchy shared by the library and the CLI."""


class RandLcmError(Exception):
    """Base class; the CLI maps every subclass to exit code 1."""


class CapacityError(RandLcmError, ValueError):
    """A sieve or table limit was exceeded."""


class DomainError(RandLcmError, ValueError):
    """An argument lies outside the domain of a formula."""


class DivergentCountError(RandLcmError, ValueError):
    """The Diophantine equation has infinitely many solutions for some ell."""


class PrecisionError(RandLcmError):
    """A requested tolerance could not be reached under the configured caps.

    The best estimate obtained is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConsistencyError(RandLcmError, AssertionError):
    """An internal cross-check failed (e.g. a Laurent tail did not cancel)."""

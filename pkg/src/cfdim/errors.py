"""Exception hierarchy shared by every cfdim module."""


class CfdimError(Exception):
    """Base class; the CLI maps every subclass to exit status 3."""


class DomainError(CfdimError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionExhausted(CfdimError, ArithmeticError):
    """A certified decision could not be made within the precision schedule."""


class EmptyWindow(CfdimError):
    """No integer lies strictly inside a digit window."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"digit window at index n={n} contains no integer")


class NoRoot(CfdimError):
    """A bracketing interval carries no sign change."""


class AmbiguousBoundary(CfdimError):
    """A point sits on a branch endpoint at the working precision."""


class Unsupported(CfdimError):
    """The requested growth family is not covered by a known dimension formula."""

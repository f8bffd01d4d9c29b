"""Exception hierarchy shared by all mixlab modules."""

from sklearn.exceptions import NotFittedError

__all__ = [
    "MixlabError",
    "DomainError",
    "CuspError",
    "ConvergenceError",
    "InadmissibleParameterError",
    "NotFittedError",
]


class MixlabError(Exception):
    """Base class for errors raised by mixlab."""


class DomainError(MixlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class CuspError(DomainError):
    """The orbit reached a rational point (a cusp) and cannot continue."""


class ConvergenceError(MixlabError, RuntimeError):
    """An iterative solver failed to reach its tolerance.

    Attributes
    ----------
    residual : float
        Residual norm at the last iterate.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InadmissibleParameterError(MixlabError, ValueError):
    """A parameter is outside the range where the result is defined."""

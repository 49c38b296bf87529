"""
Exception hierarchy shared by every pyborel module
"""
from typing import Any, Optional


class PyBorelError(Exception):
    """Base class for all pyborel errors"""


class PreconditionError(PyBorelError, ValueError):
    """An argument value violates an operation's precondition"""


class DomainError(PyBorelError, ValueError):
    """An argument lies outside the mathematical domain of a function"""

    def __init__(self, message: str, value: Any = None):
        super().__init__(message)
        self.value = value


class PoleError(DomainError):
    """Evaluation requested exactly at a pole"""


class RangeError(DomainError):
    """Argument outside the supported evaluation range of an algorithm"""


class PrecisionError(PyBorelError):
    """A tolerance comparison was attempted with error radii that are too wide"""


class ToleranceNotMetError(PyBorelError):
    """A numerical check or cross-route agreement missed its tolerance"""

    def __init__(self, message: str, achieved: Optional[Any] = None,
                 tolerance: Optional[Any] = None):
        super().__init__(message)
        self.achieved = achieved
        self.tolerance = tolerance


class QuadratureError(ToleranceNotMetError):
    """Quadrature could not reach the requested tolerance within its node budget"""

    @property
    def achieved_error(self):
        return self.achieved


class EstimationError(PyBorelError):
    """An estimate is undefined for the supplied data"""

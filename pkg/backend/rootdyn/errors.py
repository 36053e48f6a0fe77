"""
Exception hierarchy for the root-dynamics toolkit
File: errors.py

Every failure raised by the library derives from ChaosError so the CLI can
map computational errors to exit status 1 in one place.
"""

from typing import Any


class ChaosError(Exception):
    """Base class for all library errors"""


class InvalidAngle(ChaosError, ValueError):
    """An angle fraction could not be built (zero denominator)"""


class AngleParseError(ChaosError, ValueError):
    """Malformed angle literal on the command line"""


class RepetendNotFound(ChaosError):
    """Long division did not close its remainder cycle within max_len digits"""

    def __init__(self, max_len: int, den: int):
        self.max_len = max_len
        self.den = den
        super().__init__(
            f"repetend not found within {max_len} digits (denominator {den} may need up to {den} digits)"
        )


class NotInvertible(ChaosError):
    """Series reversion requested with a vanishing linear coefficient"""


class OrderNotImplemented(ChaosError):
    """Schröder first-kind map requested outside the supported orders"""


class PoleError(ChaosError, ZeroDivisionError):
    """A map denominator vanished at the evaluation point"""

    def __init__(self, point: Any, message: str = None):
        self.point = point
        super().__init__(message or f"pole at x = {point}")


class SecantPoleError(PoleError):
    """x_n + x_{n-1} = 0, i.e. f(x_n) = f(x_{n-1}) in the secant step"""

    def __init__(self, x_prev: Any, x_curr: Any):
        self.x_prev = x_prev
        self.x_curr = x_curr
        super().__init__(x_curr, f"secant denominator vanished: x_prev={x_prev}, x_curr={x_curr}")


class NoClosedForm(ChaosError):
    """The iteration has no cotangent closed form"""


class NoOracle(ChaosError):
    """A drift experiment was requested for a method without an exact oracle"""


class AtRoot(ChaosError):
    """The complex seed is exactly one of the roots ±i"""


class UnsupportedMultiplicity(ChaosError):
    """A fixed-point polynomial root of multiplicity above two"""


class DegenerateIteration(ChaosError):
    """x - H(x) vanishes identically or has no roots to decompose over"""


class NotApplicable(ChaosError):
    """A computation's structural precondition (such as a degree relation) fails"""


class RootFindingError(ChaosError):
    """Polynomial root finding did not converge"""

    def __init__(self, degree: int, detail: str):
        self.degree = degree
        super().__init__(f"roots of a degree-{degree} polynomial did not converge: {detail}")

"""
Closed-form cotangent solutions and their verification
File: oracle.py

With x = cot θ the Householder iteration of order k on x² + 1 becomes
θ -> (k+1)·θ mod π, so x_n = cot((k+1)ⁿ·θ_0); the secant method gives
θ_n = F_{n-1}·θ_0 + F_n·θ_1. Angles are reduced exactly before any big-float
evaluation, so step 200 is as accurate as step 2.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Union

import mpmath

from exactcore import RationalAngle, make_angle, secant_angle
from maps import RationalMap, eval_map, householder_map, schroeder_first_map, secant_step
from method_types import Basin, MethodKind
from rootdyn.config import get_config
from rootdyn.errors import AtRoot, NoClosedForm, PoleError
from rootdyn.models import BlowUp

logger = logging.getLogger(__name__)

_METHOD_RE = re.compile(r"^householder:(\d+)$")


@dataclass(frozen=True)
class MethodSpec:
    """An iteration family member; multiplier = k+1 for Householder order k"""
    kind: MethodKind
    order: Optional[int] = None

    def __post_init__(self):
        if self.kind is MethodKind.HOUSEHOLDER:
            if self.order is None or self.order < 1:
                raise ValueError(f"Householder order must be >= 1, got {self.order}")
        elif self.order is not None:
            raise ValueError(f"{self.kind.value} takes no order")

    @classmethod
    def householder(cls, k: int) -> "MethodSpec":
        return cls(MethodKind.HOUSEHOLDER, k)

    @classmethod
    def newton(cls) -> "MethodSpec":
        return cls.householder(1)

    @classmethod
    def halley(cls) -> "MethodSpec":
        return cls.householder(2)

    @classmethod
    def secant(cls) -> "MethodSpec":
        return cls(MethodKind.SECANT)

    @classmethod
    def schroeder3(cls) -> "MethodSpec":
        return cls(MethodKind.SCHROEDER3)

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        """newton | halley | householder:k | secant | schroeder3"""
        name = text.strip().lower()
        if name == "newton":
            return cls.newton()
        if name == "halley":
            return cls.halley()
        if name == "secant":
            return cls.secant()
        if name in ("schroeder3", "schroder3", "schröder3"):
            return cls.schroeder3()
        match = _METHOD_RE.match(name)
        if match and int(match.group(1)) >= 1:
            return cls.householder(int(match.group(1)))
        raise ValueError(f"unknown method '{text}' (expected newton, halley, householder:k, secant or schroeder3)")

    @property
    def multiplier(self) -> Optional[int]:
        return self.order + 1 if self.kind is MethodKind.HOUSEHOLDER else None

    @property
    def is_two_point(self) -> bool:
        return self.kind is MethodKind.SECANT

    def iteration_map(self) -> RationalMap:
        """The one-step rational map (secant is a two-point step and has none)"""
        if self.kind is MethodKind.SECANT:
            raise ValueError("the secant method is a two-point iteration, not a rational map")
        return _one_step_map(self)

    def __str__(self) -> str:
        if self.kind is MethodKind.HOUSEHOLDER:
            return {1: "newton", 2: "halley"}.get(self.order, f"householder:{self.order}")
        return self.kind.value


@lru_cache(maxsize=None)
def _one_step_map(spec: MethodSpec) -> RationalMap:
    if spec.kind is MethodKind.HOUSEHOLDER:
        return householder_map(spec.order)
    return schroeder_first_map(3)


def _guard() -> int:
    return get_config().precision.guard_digits


def _angle_fraction(t) -> Union[Fraction, mpmath.mpf]:
    if isinstance(t, RationalAngle):
        return t.value
    if isinstance(t, (int, Fraction)):
        return Fraction(t)
    return mpmath.mpf(t)


def cot_hp(t, digits: int):
    """cot(t·π) to `digits` significant digits, t in (0, 1)"""
    if digits < 10:
        raise ValueError(f"cot_hp needs at least 10 digits, got {digits}")
    t = _angle_fraction(t)
    if t == 0 or t == 1:
        raise PoleError(t, f"cot({t}·π) is a pole")
    with mpmath.workdps(digits + _guard()):
        if isinstance(t, Fraction):
            tm = mpmath.mpf(t.numerator) / t.denominator
        else:
            tm = mpmath.mpf(t)
        s = mpmath.sinpi(tm)
        if s == 0:
            raise PoleError(t, f"cot({t}·π) is a pole")
        value = mpmath.cospi(tm) / s
    with mpmath.workdps(digits):
        return +value


def exact_angle(m: MethodSpec, n: int, t0: RationalAngle, t1: Optional[RationalAngle] = None) -> RationalAngle:
    """The exact iterate angle θ_n/π"""
    if n < 0:
        raise ValueError(f"step index must be >= 0, got {n}")
    if m.kind is MethodKind.SCHROEDER3:
        raise NoClosedForm("Schröder's third-order iteration has no cotangent closed form")
    if m.kind is MethodKind.SECANT:
        if t1 is None:
            raise ValueError("the secant closed form needs two seed angles")
        return secant_angle(n, t0, t1)
    if t1 is not None:
        raise ValueError("a second seed angle only applies to the secant method")
    return make_angle(pow(m.multiplier, n, t0.den) * t0.num, t0.den)


def closed_form_iterate(
    m: MethodSpec,
    n: int,
    t0: RationalAngle,
    t1: Optional[RationalAngle] = None,
    digits: int = 32,
) -> Union[mpmath.mpf, BlowUp]:
    """x_n from the closed form, or BlowUp when the exact angle is 0"""
    angle = exact_angle(m, n, t0, t1)
    if angle.is_zero:
        return BlowUp(n)
    return cot_hp(angle, digits)


def direct_orbit(m: MethodSpec, x0, steps: int, x1=None) -> List:
    """Plain iteration of the map at the ambient precision; raises on poles"""
    if m.is_two_point:
        if x1 is None:
            raise ValueError("the secant method needs two seeds")
        orbit = [x0, x1]
        while len(orbit) <= steps:
            orbit.append(secant_step(orbit[-2], orbit[-1]))
        return orbit[: steps + 1]
    G = m.iteration_map()
    orbit = [x0]
    for _ in range(steps):
        orbit.append(eval_map(G, orbit[-1]))
    return orbit


def verify_theorem(
    m: MethodSpec,
    t0: RationalAngle,
    t1: Optional[RationalAngle] = None,
    n_max: int = 12,
    digits: int = 60,
):
    """Max |x_n − closed form| over n <= n_max, iterating the real map at `digits`"""
    with mpmath.workdps(digits):
        x0 = cot_hp(t0, digits)
        x1 = cot_hp(t1, digits) if t1 is not None else None
        orbit = direct_orbit(m, x0, n_max, x1)

    max_error = mpmath.mpf(0)
    with mpmath.workdps(digits + _guard()):
        for n, x in enumerate(orbit):
            oracle = closed_form_iterate(m, n, t0, t1, digits + _guard())
            if isinstance(oracle, BlowUp):
                raise PoleError(x, f"exact orbit blows up at step {n}, before n_max={n_max}")
            max_error = max(max_error, abs(x - oracle))
    logger.info(f"verify {m} from {t0}{'' if t1 is None else f', {t1}'}: max error {mpmath.nstr(max_error, 5)}")
    return max_error


@dataclass(frozen=True)
class ComplexAngle:
    """θ = alpha + i·beta with cot θ equal to a complex seed"""
    alpha: mpmath.mpf
    beta: mpmath.mpf

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must lie in [0, π), got {self.alpha}")

    @property
    def theta(self) -> mpmath.mpc:
        return mpmath.mpc(self.alpha, self.beta)


def complex_theta(x0, digits: int = 40) -> ComplexAngle:
    """Invert x0 = cot θ through θ = (i/2)·log((x0 − i)/(x0 + i)), alpha folded into [0, π)"""
    with mpmath.workdps(digits + _guard()):
        x = mpmath.mpc(x0)
        if x == mpmath.mpc(0, 1) or x == mpmath.mpc(0, -1):
            raise AtRoot(f"seed {x0} is a root of x² + 1")
        theta = mpmath.mpc(0, 0.5) * mpmath.log((x - 1j) / (x + 1j))
        alpha = theta.real
        alpha -= mpmath.pi * mpmath.floor(alpha / mpmath.pi)
        if alpha >= mpmath.pi:
            alpha = mpmath.mpf(0)
        beta = mpmath.mpf(0) if x.imag == 0 else theta.imag
        return ComplexAngle(+alpha, +beta)


@dataclass(frozen=True)
class DeviationPair:
    """x_n + i and x_n − i from the closed form"""
    plus: mpmath.mpc
    minus: mpmath.mpc


def deviation_pair(k: int, n: int, theta: ComplexAngle, digits: int = 40) -> DeviationPair:
    """
    x_n ± i = exp(±i·M·θ) / sin(M·θ) with M = (k+1)ⁿ.

    For beta < 0 the magnitude of x_n − i decays like exp(2·beta·M), the
    contraction toward +i.
    """
    if k < 1 or n < 0:
        raise ValueError(f"need k >= 1 and n >= 0, got k={k}, n={n}")
    M = (k + 1) ** n
    with mpmath.workdps(digits + _guard()):
        z = theta.theta * M
        s = mpmath.sin(z)
        if abs(s) < mpmath.mpf(10) ** (-digits):
            raise PoleError(z, f"sin((k+1)^n·θ) vanishes at n={n}")
        plus = mpmath.exp(1j * z) / s
        minus = mpmath.exp(-1j * z) / s
    return DeviationPair(plus, minus)


def predict_basin(x0) -> Basin:
    """Upper half-plane -> +i, lower -> -i, real axis never converges"""
    im = mpmath.mpc(x0).imag
    if im > 0:
        return Basin.PLUS_I
    if im < 0:
        return Basin.MINUS_I
    return Basin.REAL_LINE

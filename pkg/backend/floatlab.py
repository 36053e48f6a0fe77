"""
Finite-precision orbit experiments
File: floatlab.py

Runs the iteration maps in decimal floating point at a fixed number of
significant digits, rounding to nearest after every operation, and measures
how round-off destroys the exact behaviour: cycles fall apart, a spurious
zero escapes, and a predicted blow-up turns into a huge value that decays by
the factor 1/(k+1) per step. Iterates are handed back as mpmath big-floats.
"""

import decimal
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence

import mpmath
import pandas as pd

from csv_repository import DriftCSVRepository
from exactcore import RationalAngle, classify_orbit, classify_secant_orbit
from maps import Poly
from method_types import MethodKind
from oracle import MethodSpec, closed_form_iterate, cot_hp
from rootdyn.config import get_config
from rootdyn.errors import NoClosedForm, NoOracle
from rootdyn.models import BlowUp, DriftReport, DriftStep, OrbitClass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrecisionConfig:
    """Working precision in significant decimal digits"""
    decimal_digits: int

    def __post_init__(self):
        if self.decimal_digits < 5:
            raise ValueError(f"decimal_digits must be >= 5, got {self.decimal_digits}")

    def context(self):
        """mpmath scope for big-float work at this precision"""
        return mpmath.workdps(self.decimal_digits)

    def decimal_context(self) -> decimal.Context:
        return decimal.Context(
            prec=self.decimal_digits,
            rounding=decimal.ROUND_HALF_EVEN,
            Emax=decimal.MAX_EMAX,
            Emin=decimal.MIN_EMIN,
            traps=[decimal.InvalidOperation],
        )

    @property
    def near_pole_threshold(self) -> decimal.Decimal:
        return decimal.Decimal(1).scaleb(-(self.decimal_digits // 2))

    def to_decimal(self, x) -> decimal.Decimal:
        """Round a real number to the nearest decimal_digits-digit decimal"""
        ctx = self.decimal_context()
        if isinstance(x, decimal.Decimal):
            return ctx.plus(x)
        if isinstance(x, (complex, mpmath.mpc)):
            raise ValueError(f"decimal iteration needs a real seed, got {x}")
        if isinstance(x, Fraction):
            return ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
        if isinstance(x, (int, str)):
            return ctx.create_decimal(x.strip() if isinstance(x, str) else x)
        # 10 extra digits keep the double rounding of the binary value negligible
        with mpmath.workdps(self.decimal_digits + 10):
            text = mpmath.nstr(mpmath.mpf(x), self.decimal_digits + 10, strip_zeros=False)
        return ctx.create_decimal(text)

    def to_mpf(self, x: decimal.Decimal):
        """Decimal value as a big-float carrying guard digits"""
        with mpmath.workdps(self.decimal_digits + get_config().precision.guard_digits):
            return mpmath.mpf(str(x))

    def quantize(self, x):
        """Round x to decimal_digits significant decimal digits"""
        if isinstance(x, (complex, mpmath.mpc)):
            re_part, im_part = self.quantize(x.real), self.quantize(x.imag)
            with mpmath.workdps(self.decimal_digits + get_config().precision.guard_digits):
                return mpmath.mpc(re_part, im_part)
        return self.to_mpf(self.to_decimal(x))


@dataclass(frozen=True)
class PoleEvent:
    """The map denominator vanished exactly while computing x_step"""
    step: int
    value: Any


@dataclass
class FloatOrbit:
    """Computed iterates x_0, x_1, ... plus pole bookkeeping"""
    values: List[Any] = field(default_factory=list)
    pole: Optional[PoleEvent] = None
    near_poles: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def __iter__(self) -> Iterator:
        return iter(self.values)


def _working(value):
    if isinstance(value, complex) or hasattr(value, "_mpc_"):
        return +mpmath.mpc(value)
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return +mpmath.mpf(value)


def _decimal_coeffs(p: Poly, ctx: decimal.Context) -> List[decimal.Decimal]:
    return [ctx.divide(decimal.Decimal(c.numerator), decimal.Decimal(c.denominator)) for c in p.coeffs]


def _horner(coeffs: Sequence[decimal.Decimal], x: decimal.Decimal, ctx: decimal.Context) -> decimal.Decimal:
    if not coeffs:
        return decimal.Decimal(0)
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = ctx.add(ctx.multiply(acc, x), c)
    return acc


def iterate_float(
    m: MethodSpec,
    x0,
    steps: int,
    prec: PrecisionConfig,
    x1=None,
) -> FloatOrbit:
    """
    Iterate in decimal arithmetic with every operation rounded to nearest at
    prec.decimal_digits. Near-pole steps (|den| < 10^(-digits/2)·|num|) are
    recorded and iteration goes on; an exactly vanishing denominator ends
    the orbit with a PoleEvent.
    """
    orbit = FloatOrbit()
    threshold = prec.near_pole_threshold
    ctx = prec.decimal_context()
    trail: List[decimal.Decimal] = []

    if m.is_two_point:
        if x1 is None:
            raise ValueError("the secant method needs two seeds")
        prev, curr = prec.to_decimal(x0), prec.to_decimal(x1)
        trail.append(prev)
        if steps >= 1:
            trail.append(curr)
        one = decimal.Decimal(1)
        for n in range(2, steps + 1):
            num = ctx.subtract(ctx.multiply(curr, prev), one)
            den = ctx.add(curr, prev)
            if den.is_zero():
                orbit.pole = PoleEvent(n, prec.to_mpf(curr))
                break
            if abs(den) < ctx.multiply(threshold, abs(num)):
                orbit.near_poles.append(n)
            prev, curr = curr, ctx.divide(num, den)
            trail.append(curr)
    else:
        G = m.iteration_map()
        num_coeffs = _decimal_coeffs(G.num, ctx)
        den_coeffs = _decimal_coeffs(G.den, ctx)
        x = prec.to_decimal(x0)
        trail.append(x)
        for n in range(1, steps + 1):
            num = _horner(num_coeffs, x, ctx)
            den = _horner(den_coeffs, x, ctx)
            if den.is_zero():
                orbit.pole = PoleEvent(n, prec.to_mpf(x))
                break
            if abs(den) < ctx.multiply(threshold, abs(num)):
                orbit.near_poles.append(n)
            x = ctx.divide(num, den)
            trail.append(x)

    orbit.values = [prec.to_mpf(v) for v in trail]
    if orbit.pole is not None:
        logger.info(f"{m}: exact pole while computing x_{orbit.pole.step}, orbit stops")
    if orbit.near_poles:
        logger.debug(f"{m}: near-pole steps {orbit.near_poles}")
    return orbit


def _exact_verdict(m: MethodSpec, t0: RationalAngle, t1: Optional[RationalAngle]) -> OrbitClass:
    if m.is_two_point:
        if t1 is None:
            raise ValueError("the secant method needs two seed angles")
        return classify_secant_orbit(t0, t1)
    return classify_orbit(t0, m.multiplier)


def drift_report(
    m: MethodSpec,
    t0: RationalAngle,
    steps: int,
    prec: PrecisionConfig,
    tol,
    t1: Optional[RationalAngle] = None,
) -> DriftReport:
    """Float orbit from cot(t0·π) against the exact oracle at +guard digits"""
    if m.kind is MethodKind.SCHROEDER3:
        raise NoOracle("Schröder's third-order iteration has no closed-form oracle")

    oracle_digits = prec.decimal_digits + get_config().precision.oracle_guard_digits
    verdict = _exact_verdict(m, t0, t1)
    blowup = verdict.blowup_step if verdict.is_blowup else None
    if blowup is not None and blowup <= steps:
        logger.warning(f"{m} from {t0}: exact orbit blows up at step {blowup}; no oracle from there on")

    x0 = prec.quantize(cot_hp(t0, oracle_digits))
    x1 = prec.quantize(cot_hp(t1, oracle_digits)) if t1 is not None else None
    orbit = iterate_float(m, x0, steps, prec, x1)

    tol = mpmath.mpf(tol)
    report = DriftReport(
        method=str(m),
        digits=prec.decimal_digits,
        oracle_digits=oracle_digits,
        tol=float(tol),
        pole_step=orbit.pole.step if orbit.pole else None,
        near_pole_steps=list(orbit.near_poles),
    )

    with mpmath.workdps(oracle_digits):
        for n, x in enumerate(orbit.values):
            if blowup is not None and n >= blowup:
                report.steps.append(DriftStep(n, x))
                continue
            oracle = closed_form_iterate(m, n, t0, t1, oracle_digits)
            if isinstance(oracle, BlowUp):
                report.steps.append(DriftStep(n, x))
                continue
            error = abs(x - oracle)
            report.steps.append(DriftStep(n, x, oracle, error))
            if report.first_tol_breach is None and error > tol:
                report.first_tol_breach = n

        if not verdict.is_blowup:
            p = verdict.period
            for n in range(verdict.preperiod + p, len(orbit.values)):
                if abs(orbit.values[n] - orbit.values[n - p]) > tol:
                    report.first_period_failure = n
                    break

    logger.info(str(report))
    return report


def precision_sweep(
    m: MethodSpec,
    t0: RationalAngle,
    digits_list: Iterable[int],
    steps: int,
    tol,
    t1: Optional[RationalAngle] = None,
) -> Dict[int, Optional[int]]:
    """first_period_failure for each working precision"""
    results = {}
    for d in digits_list:
        report = drift_report(m, t0, steps, PrecisionConfig(d), tol, t1)
        results[d] = report.first_period_failure
    return results


def _angle_value(t):
    if isinstance(t, RationalAngle):
        return mpmath.mpf(t.num) / t.den
    return _working(t)


def angle_track(
    m: MethodSpec,
    t0,
    steps: int,
    prec: PrecisionConfig,
    t1=None,
) -> List[mpmath.mpf]:
    """
    Angles θ_n/π mod 1 computed in floating point: frac(mⁿ·t0) for
    Householder maps, frac(θ_{n-1} + θ_n) for the secant pair.
    """
    if m.kind is MethodKind.SCHROEDER3:
        raise NoClosedForm("Schröder's third-order iteration has no angle dynamics")
    with prec.context():
        t = mpmath.frac(_angle_value(t0))
        track = [t]
        if m.is_two_point:
            if t1 is None:
                raise ValueError("the secant angle track needs two seed angles")
            curr = mpmath.frac(_angle_value(t1))
            if steps >= 1:
                track.append(curr)
            prev = t
            while len(track) <= steps:
                prev, curr = curr, mpmath.frac(prev + curr)
                track.append(curr)
        else:
            mult = m.multiplier
            for _ in range(steps):
                t = mpmath.frac(t * mult)
                track.append(t)
    return track


def shift_digits(track: Iterable, base: int) -> List[int]:
    """Leading base-`base` digit of each tracked angle"""
    return [int(mpmath.floor(t * base)) for t in track]


def circular_distance(a, b):
    """Distance between two angles on the unit circle R/Z"""
    d = mpmath.frac(a - b)
    return min(d, 1 - d)


def write_csv(report: DriftReport, destination) -> None:
    """n,float_value,oracle_value,abs_error in scientific notation"""
    DriftCSVRepository().write_report(report, destination)


def read_csv(source) -> pd.DataFrame:
    return DriftCSVRepository().read_frame(source)

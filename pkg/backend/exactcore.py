"""
Exact angle arithmetic and orbit classification
File: exactcore.py

Angles are stored as t = θ/π, reduced fractions in [0, 1). Householder
iteration of order k acts on them as the shift t -> (k+1)·t mod 1, the secant
method as the Fibonacci recurrence t_{n+1} = t_n + t_{n-1} mod 1.
Angle 0 is the blown-up state (cot 0 is undefined).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Union

from rootdyn.errors import InvalidAngle, RepetendNotFound
from rootdyn.models import DigitExpansion, OrbitClass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalAngle:
    """Reduced fraction num/den in [0, 1) standing for the angle (num/den)·π"""
    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise InvalidAngle(f"denominator must be positive, got {self.den}")
        if not 0 <= self.num < self.den:
            raise InvalidAngle(f"{self.num}/{self.den} is outside [0, 1)")
        if gcd(self.num, self.den) != 1:
            raise InvalidAngle(f"{self.num}/{self.den} is not reduced")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "RationalAngle":
        return make_angle(value.numerator, value.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    @property
    def is_half(self) -> bool:
        return self.den == 2

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return "0" if self.num == 0 else f"{self.num}/{self.den}"


AngleLike = Union[RationalAngle, Fraction, int]


def make_angle(num: int, den: int) -> RationalAngle:
    """Reduce num/den into the unique representative in [0, 1)"""
    if den == 0:
        raise InvalidAngle(f"zero denominator in {num}/{den}")
    if den < 0:
        num, den = -num, -den
    num %= den
    g = gcd(num, den)
    return RationalAngle(num // g, den // g)


def as_angle(value: AngleLike) -> RationalAngle:
    if isinstance(value, RationalAngle):
        return value
    if isinstance(value, (Fraction, int)):
        value = Fraction(value)
        return make_angle(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as a rational angle")


def add_angles(a: RationalAngle, b: RationalAngle) -> RationalAngle:
    return make_angle(a.num * b.den + b.num * a.den, a.den * b.den)


def _check_multiplier(m: int):
    if m < 2:
        raise ValueError(f"shift multiplier must be >= 2, got {m}")


def shift(t: RationalAngle, m: int) -> RationalAngle:
    """(m·t) mod 1"""
    return make_angle(m * t.num, t.den)


def iterate_angles(t0: RationalAngle, m: int, steps: int) -> List[RationalAngle]:
    """t0, m·t0, m²·t0, ... (steps + 1 angles, mod 1)"""
    angles = [t0]
    for _ in range(steps):
        angles.append(shift(angles[-1], m))
    return angles


def periodic_angle(m: int, n: int, M: int) -> RationalAngle:
    """M/(mⁿ − 1): an angle whose shift orbit returns to itself after n steps"""
    _check_multiplier(m)
    if n < 1:
        raise ValueError(f"cycle length must be >= 1, got {n}")
    return make_angle(M, m ** n - 1)


def classify_orbit(t0: RationalAngle, m: int) -> OrbitClass:
    """
    Simulate the shift map on exact angles and classify the orbit.

    Every iterate has a denominator dividing den(t0), so at most den(t0)
    distinct states occur before a repeat or a zero.
    """
    _check_multiplier(m)
    den = t0.den
    n = t0.num
    seen: dict[int, int] = {}
    zero_iterate = False
    step = 0

    while True:
        if n == 0:
            return OrbitClass.blows_up(step, zero_iterate=zero_iterate)
        if n in seen:
            start = seen[n]
            return OrbitClass.eventually_periodic(start, step - start, zero_iterate=zero_iterate)
        seen[n] = step
        if 2 * n == den:
            zero_iterate = True
        n = (m * n) % den
        step += 1


def multiplicative_order(m: int, d: int) -> int:
    """Least p >= 1 with m^p ≡ 1 (mod d)"""
    if d < 1:
        raise ValueError(f"modulus must be positive, got {d}")
    if d == 1:
        return 1
    if gcd(m, d) != 1:
        raise ValueError(f"{m} is not invertible modulo {d}")
    p, x = 1, m % d
    while x != 1:
        x = (x * m) % d
        p += 1
    return p


def _split_denominator(den: int, m: int) -> tuple[int, int]:
    """den = d1·d2 where d1 collects the primes shared with m and gcd(d2, m) = 1"""
    d1, d2 = 1, den
    g = gcd(d2, m)
    while g > 1:
        d2 //= g
        d1 *= g
        g = gcd(d2, m)
    return d1, d2


def predict_orbit(t0: RationalAngle, m: int) -> OrbitClass:
    """
    Number-theoretic orbit verdict, no simulation.

    With den = d1·d2 split as above, the orbit blows up iff d2 = 1, at the
    least n with den | mⁿ. Otherwise the prime period is the order of m
    modulo d2 and the preperiod is the least n with d1 | mⁿ.
    """
    _check_multiplier(m)
    if t0.num == 0:
        return OrbitClass.blows_up(0, zero_iterate=False)

    den = t0.den
    d1, d2 = _split_denominator(den, m)

    if d2 == 1:
        step, power = 0, 1
        zero_iterate = False
        while power % den:
            if den // gcd(den, power) == 2:
                zero_iterate = True
            power *= m
            step += 1
        return OrbitClass.blows_up(step, zero_iterate=zero_iterate)

    period = multiplicative_order(m, d2)
    preperiod, power = 0, 1
    while power % d1:
        power *= m
        preperiod += 1
    # the cycle lives on denominator d2; angle 1/2 can only appear there
    return OrbitClass.eventually_periodic(preperiod, period, zero_iterate=(d2 == 2))


def digits(t: RationalAngle, base: int, max_len: int) -> DigitExpansion:
    """Radix expansion of t by long division with remainder-cycle detection"""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    den = t.den
    remainder = t.num
    seen: dict[int, int] = {}
    out: list[int] = []

    while remainder != 0:
        if remainder in seen:
            start = seen[remainder]
            return DigitExpansion(base, tuple(out[:start]), tuple(out[start:]))
        if len(out) >= max_len:
            raise RepetendNotFound(max_len, den)
        seen[remainder] = len(out)
        remainder *= base
        out.append(remainder // den)
        remainder %= den

    return DigitExpansion(base, tuple(out), ())


def _fib_pair(n: int) -> tuple[int, int]:
    # fast doubling: F(2k) = F(k)(2F(k+1) - F(k)), F(2k+1) = F(k)² + F(k+1)²
    if n == 0:
        return 0, 1
    a, b = _fib_pair(n >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    return (d, c + d) if n & 1 else (c, d)


def fib(n: int) -> int:
    """F_n with F_0 = 0, F_1 = F_2 = 1"""
    if n < 0:
        raise ValueError(f"fib expects n >= 0, got {n}")
    return _fib_pair(n)[0]


def fib_signed(n: int) -> int:
    """Fibonacci numbers extended to negative indices: F_{-n} = (-1)^(n+1)·F_n"""
    if n >= 0:
        return fib(n)
    value = fib(-n)
    return value if (-n) % 2 == 1 else -value


def secant_angle(n: int, t0: RationalAngle, t1: RationalAngle) -> RationalAngle:
    """θ_n/π = F_{n-1}·t0 + F_n·t1 mod 1"""
    if n < 0:
        raise ValueError(f"step index must be >= 0, got {n}")
    a, b = fib_signed(n - 1), fib(n)
    return make_angle(a * t0.num * t1.den + b * t1.num * t0.den, t0.den * t1.den)


@dataclass(frozen=True)
class SecantAngleState:
    """Consecutive secant angles (θ_{n-1}, θ_n)"""
    prev: RationalAngle
    curr: RationalAngle

    def step(self) -> "SecantAngleState":
        return SecantAngleState(self.curr, add_angles(self.prev, self.curr))


def _common_numerators(t0: RationalAngle, t1: RationalAngle) -> tuple[int, int, int]:
    L = lcm(t0.den, t1.den)
    return t0.num * (L // t0.den), t1.num * (L // t1.den), L


def secant_blowup_step(t0: RationalAngle, t1: RationalAngle, max_n: int) -> Optional[int]:
    """
    Least N <= max_n with F_{N-1}·t0 + F_N·t1 ≡ 0 (mod 1), or None.

    Fibonacci numbers are reduced modulo the common denominator L; once the
    pair (F_{N-1}, F_N) mod L returns to (1, 0) the condition values repeat,
    so the search stops early.
    """
    a, b, L = _common_numerators(t0, t1)
    f_prev, f_curr = 1 % L, 0
    for N in range(max_n + 1):
        if (f_prev * a + f_curr * b) % L == 0:
            return N
        f_prev, f_curr = f_curr, (f_prev + f_curr) % L
        if f_prev == 1 % L and f_curr == 0:
            return None
    return None


def classify_secant_orbit(t0: RationalAngle, t1: RationalAngle) -> OrbitClass:
    """Cycle detection on the pair state (θ_{n-1}, θ_n)"""
    u, v, L = _common_numerators(t0, t1)
    if u == 0:
        return OrbitClass.blows_up(0, zero_iterate=False)

    seen: dict[tuple[int, int], int] = {}
    zero_iterate = 2 * u == L
    step = 0
    while True:
        if v == 0:
            return OrbitClass.blows_up(step + 1, zero_iterate=zero_iterate)
        state = (u, v)
        if state in seen:
            start = seen[state]
            return OrbitClass.eventually_periodic(start, step - start, zero_iterate=zero_iterate)
        seen[state] = step
        if 2 * v == L:
            zero_iterate = True
        u, v = v, (u + v) % L
        step += 1


def secant_blowup_seeds(t: RationalAngle, N: int) -> SecantAngleState:
    """
    Backwards Fibonacci: the seeds (θ_0, θ_1) whose secant orbit has
    θ_{N-1} = t and θ_N = 0.
    """
    if N < 1:
        raise ValueError(f"blow-up step must be >= 1, got {N}")
    sign0 = 1 if (N + 1) % 2 == 0 else -1
    theta0 = make_angle(sign0 * fib(N) * t.num, t.den)
    theta1 = make_angle(-sign0 * fib(N - 1) * t.num, t.den)
    logger.debug(f"secant seeds for blow-up at step {N} through {t}: ({theta0}, {theta1})")
    return SecantAngleState(theta0, theta1)

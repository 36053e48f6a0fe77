"""
Iteration maps for f(x) = x² + 1
File: maps.py

Exact polynomials over Q, reduced rational maps, and the constructions of the
Householder family (through the k-th derivative of 1/f written with
Gaussian-rational partial fractions), Schröder's first-kind maps (through
series reversion) and the secant two-point step.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd, lcm
from typing import Any, Generic, Sequence, TypeVar, Union

import mpmath
import numpy as np

from rootdyn.errors import NotInvertible, OrderNotImplemented, PoleError, SecantPoleError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


def _is_mp(x: Any) -> bool:
    return hasattr(x, "_mpf_") or hasattr(x, "_mpc_")


def _is_hw_float(x: Any) -> bool:
    return isinstance(x, (float, complex, np.ndarray, np.number))


def to_mpf(q: Scalar):
    """Exact rational to a big-float at the current working precision"""
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact rational coefficients, ascending degree"""
    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs: Scalar) -> "Poly":
        return cls(tuple(coeffs))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @staticmethod
    def _lift(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers of a polynomial are not polynomials")
        result, base = Poly.of(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 1)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(tuple(quot)), Poly(tuple(rem[:dq] if dq > 0 else ()))

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    def integral(self) -> "Poly":
        """Antiderivative with zero constant term"""
        return Poly((0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def reflect(self) -> "Poly":
        """p(-x)"""
        return Poly(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def monic(self) -> "Poly":
        if not self:
            return self
        return Poly(tuple(c / self.leading for c in self.coeffs))

    def compose(self, other: "Poly") -> "Poly":
        """self(other(x))"""
        result = Poly()
        for c in reversed(self.coeffs):
            result = result * other + c
        return result

    def coerced_coeffs(self, x: Any) -> list:
        """Coefficients converted to the arithmetic kind of x"""
        if isinstance(x, (int, Fraction)):
            return list(self.coeffs)
        if _is_mp(x):
            return [to_mpf(c) for c in self.coeffs]
        if _is_hw_float(x):
            return [float(c) for c in self.coeffs]
        return list(self.coeffs)

    def __call__(self, x: Any):
        """Horner evaluation, exact for rational x"""
        if isinstance(x, int):
            x = Fraction(x)
        coeffs = self.coerced_coeffs(x)
        if not coeffs:
            return x * 0
        acc = x * 0 + coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * x + c
        return acc

    def descending_floats(self) -> np.ndarray:
        """Coefficients highest degree first, as float64 for np.polyval"""
        return np.array([float(c) for c in reversed(self.coeffs)] or [0.0])

    def descending_mp(self) -> list:
        return [to_mpf(c) for c in reversed(self.coeffs)]

    def __str__(self) -> str:
        return format_poly(self.coeffs)


def format_poly(coeffs: Sequence[Scalar]) -> str:
    """'3x^4 - 6x^2 - 1' from ascending coefficients"""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        mag = abs(c)
        mag_text = str(mag) if mag.denominator == 1 else f"({mag})"
        if k == 0:
            body = mag_text
        else:
            power = "x" if k == 1 else f"x^{k}"
            body = power if mag == 1 else f"{mag_text}{power}"
        if not terms:
            terms.append(f"-{body}" if c < 0 else body)
        else:
            terms.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(terms) or "0"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm over Q"""
    while b:
        a, b = b, a % b
    return a.monic()


def _integer_normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    # common scale making every coefficient an integer with joint content 1
    coeffs = num.coeffs + den.coeffs
    scale = 1
    for c in coeffs:
        scale = lcm(scale, c.denominator)
    ints = [int(c * scale) for c in coeffs]
    content = 0
    for v in ints:
        content = gcd(content, v)
    factor = Fraction(scale, content or 1)
    if den.leading < 0:
        factor = -factor
    return num * factor, den * factor


def integer_primitive(p: Poly) -> Poly:
    """Scalar multiple of p with coprime integer coefficients and positive leading term"""
    if not p:
        return p
    scale = 1
    for c in p.coeffs:
        scale = lcm(scale, c.denominator)
    content = 0
    for c in p.coeffs:
        content = gcd(content, int(c * scale))
    factor = Fraction(scale, content)
    return p * (factor if p.leading > 0 else -factor)


@dataclass(frozen=True)
class RationalMap:
    """
    num/den in canonical form: gcd(num, den) = 1, integer coefficients with
    joint content 1, den with positive leading coefficient.
    """
    num: Poly
    den: Poly

    def __post_init__(self):
        num, den = self.num, self.den
        if not den:
            raise ZeroDivisionError("rational map with identically zero denominator")
        if not num:
            num, den = Poly(), Poly.of(1)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            num, den = _integer_normalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls(Poly.x(), Poly.of(1))

    @classmethod
    def constant(cls, c: Scalar) -> "RationalMap":
        return cls(Poly.of(c), Poly.of(1))

    @classmethod
    def from_poly(cls, p: Poly) -> "RationalMap":
        return cls(p, Poly.of(1))

    @staticmethod
    def _lift(other) -> "RationalMap":
        if isinstance(other, RationalMap):
            return other
        if isinstance(other, Poly):
            return RationalMap.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RationalMap.constant(other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.num)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RationalMap(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalMap":
        return RationalMap(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RationalMap(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not other:
            raise ZeroDivisionError("division by the zero rational map")
        return RationalMap(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int) -> "RationalMap":
        if n < 0:
            return RationalMap.constant(1) / (self ** -n)
        return RationalMap(self.num ** n, self.den ** n)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.num.degree, self.den.degree

    def compose(self, other: "RationalMap") -> "RationalMap":
        """self(other(x)), homogenised over other's denominator"""
        d = max(self.num.degree, self.den.degree, 0)
        powers_n = [Poly.of(1)]
        powers_d = [Poly.of(1)]
        for _ in range(d):
            powers_n.append(powers_n[-1] * other.num)
            powers_d.append(powers_d[-1] * other.den)

        def lift(p: Poly) -> Poly:
            acc = Poly()
            for j, c in enumerate(p.coeffs):
                acc = acc + c * powers_n[j] * powers_d[d - j]
            return acc

        return RationalMap(lift(self.num), lift(self.den))

    def derivative(self) -> "RationalMap":
        return RationalMap(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def reflect(self) -> "RationalMap":
        """G(-x)"""
        return RationalMap(self.num.reflect(), self.den.reflect())

    def is_odd(self) -> bool:
        return self.reflect() == -self

    def fixed_point_polynomial(self) -> Poly:
        """x·den − num, whose roots are the finite fixed points"""
        return Poly.x() * self.den - self.num

    def leading_ratio(self) -> Fraction:
        return self.num.leading / self.den.leading

    def __call__(self, x: Any):
        return eval_map(self, x)

    def __str__(self) -> str:
        return f"({format_poly(self.num.coeffs)})/({format_poly(self.den.coeffs)})"


def eval_map(m: RationalMap, x: Any):
    """Horner evaluation of num and den; a vanishing den is a pole"""
    if isinstance(x, int):
        x = Fraction(x)
    den = m.den(x)
    if den == 0:
        raise PoleError(x)
    return m.num(x) / den


def iterate_map(G: RationalMap, n: int) -> RationalMap:
    """G composed with itself n times (identity for n = 0)"""
    if n < 0:
        raise ValueError(f"composition count must be >= 0, got {n}")
    result = RationalMap.identity()
    for _ in range(n):
        result = G.compose(result)
    return result


@dataclass(frozen=True)
class GaussianPoly:
    """re(x) + i·im(x) with exact rational polynomials"""
    re: Poly
    im: Poly

    @classmethod
    def x_plus(cls, a: Scalar, b: Scalar) -> "GaussianPoly":
        """x + (a + b·i)"""
        return cls(Poly.of(a, 1), Poly.of(b))

    @classmethod
    def scalar(cls, a: Scalar, b: Scalar = 0) -> "GaussianPoly":
        return cls(Poly.of(a), Poly.of(b))

    def __add__(self, other: "GaussianPoly") -> "GaussianPoly":
        return GaussianPoly(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianPoly") -> "GaussianPoly":
        return GaussianPoly(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianPoly") -> "GaussianPoly":
        return GaussianPoly(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __pow__(self, n: int) -> "GaussianPoly":
        result, base = GaussianPoly.scalar(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "GaussianPoly":
        return GaussianPoly(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return not self.im


@dataclass(frozen=True)
class GaussianRationalMap:
    """Unreduced quotient of Gaussian-rational polynomials"""
    num: GaussianPoly
    den: GaussianPoly

    def real_form(self) -> RationalMap:
        if not (self.num.is_real and self.den.is_real):
            raise ValueError("imaginary parts do not cancel")
        return RationalMap(self.num.re, self.den.re)


@dataclass(frozen=True)
class InverseDerivative:
    gaussian: GaussianRationalMap
    real: RationalMap


def inv_f_derivative(k: int) -> InverseDerivative:
    """
    k-th derivative of 1/(x²+1) from the partial fractions
    (i/2)·(-1)^k·k!·[(x+i)^-(k+1) − (x−i)^-(k+1)] over the common
    denominator (x²+1)^(k+1).
    """
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    plus = GaussianPoly.x_plus(0, 1)
    minus = GaussianPoly.x_plus(0, -1)
    c = (-1) ** k * factorial(k)
    scale = GaussianPoly.scalar(0, Fraction(c, 2))
    num = scale * (minus ** (k + 1) - plus ** (k + 1))
    den = plus ** (k + 1) * minus ** (k + 1)
    gaussian = GaussianRationalMap(num, den)
    return InverseDerivative(gaussian, gaussian.real_form())


def householder_map(k: int) -> RationalMap:
    """x + k·(1/f)^(k-1)(x) / (1/f)^(k)(x) for f = x² + 1"""
    if k < 1:
        raise ValueError(f"Householder order must be >= 1, got {k}")
    lower = inv_f_derivative(k - 1).real
    upper = inv_f_derivative(k).real
    G = RationalMap.identity() + k * (lower / upper)
    logger.debug(f"householder_map({k}) = {G}")
    return G


def cot_multiple_map(m: int) -> RationalMap:
    """cot(mθ) as a rational function of cot θ: Re((x+i)^m) / Im((x+i)^m)"""
    if m < 1:
        raise ValueError(f"angle multiple must be >= 1, got {m}")
    z = GaussianPoly.x_plus(0, 1) ** m
    return RationalMap(z.re, z.im)


T = TypeVar("T")


@dataclass(frozen=True)
class ReversionCoeffs(Generic[T]):
    """Δx = A1·Δy + A2·Δy² + A3·Δy³"""
    A1: T
    A2: T
    A3: T


def series_revert(a1: T, a2: T, a3: T) -> ReversionCoeffs[T]:
    """
    Invert Δy = a1·Δx + a2·Δx² + a3·Δx³ through third order.

    Works over any exact field element supporting + - * / and powers:
    Fractions, or RationalMaps when the coefficients depend on x.
    """
    a1, a2, a3 = (Fraction(a) if isinstance(a, int) else a for a in (a1, a2, a3))
    if not a1:
        raise NotInvertible("series reversion needs a nonzero linear coefficient a1")
    A1 = 1 / a1
    A2 = -a2 / a1 ** 3
    A3 = (2 * a2 ** 2 - a1 * a3) / a1 ** 5
    return ReversionCoeffs(A1, A2, A3)


def reversion_residual(a1: T, a2: T, a3: T, rev: ReversionCoeffs[T]) -> tuple[T, T, T]:
    """Coefficients of Δx, Δx², Δx³ in (reverted ∘ forward) minus the identity"""
    c1 = rev.A1 * a1
    c2 = rev.A1 * a2 + rev.A2 * a1 ** 2
    c3 = rev.A1 * a3 + 2 * rev.A2 * a1 * a2 + rev.A3 * a1 ** 3
    return c1 - 1, c2, c3


TARGET = Poly.of(1, 0, 1)


def schroeder_first_map(order: int) -> RationalMap:
    """Schröder first-kind iteration on x² + 1 truncated at the given order"""
    if order not in (2, 3):
        raise OrderNotImplemented(f"Schröder first-kind map of order {order} (supported: 2, 3)")
    f = TARGET
    a1 = RationalMap.from_poly(f.derivative())
    a2 = RationalMap.from_poly(f.derivative().derivative()) * Fraction(1, 2)
    a3 = RationalMap.from_poly(f.derivative().derivative().derivative()) * Fraction(1, 6)
    rev = series_revert(a1, a2, a3)
    dy = RationalMap.from_poly(-f)

    G = RationalMap.identity() + rev.A1 * dy
    if order == 3:
        G = G + rev.A2 * dy ** 2
    return G


def secant_step(x_prev, x_curr):
    """(x_curr·x_prev − 1)/(x_curr + x_prev), the secant step on x² + 1"""
    if isinstance(x_prev, int):
        x_prev = Fraction(x_prev)
    if isinstance(x_curr, int):
        x_curr = Fraction(x_curr)
    den = x_curr + x_prev
    if den == 0:
        raise SecantPoleError(x_prev, x_curr)
    return (x_curr * x_prev - 1) / den

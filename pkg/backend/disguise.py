"""
Any one-step iteration as Newton's method
File: disguise.py

For a rational iteration H, Newton's method on h reproduces H exactly when
h'/h = 1/(x − H(x)). Writing 1/(x − H) = den/P with P = x·den − num, the
partial fractions of den/P integrate to
    h(x) = C · ∏ (x − r)^c · exp(p(x) − Σ b/(x − r))
where simple roots r of P give the exponents c, double roots add the polar
terms b/(x − r)², and the polynomial part of den/P integrates to p.
Also here: fixed points with their multipliers, and the exponent of the
singularity forced on a solution S of S(mθ) = G(S(θ)).
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import mpmath

from maps import Poly, RationalMap, eval_map, format_poly, integer_primitive, poly_gcd, to_mpf
from method_types import Stability
from rootdyn.config import get_config
from rootdyn.errors import (
    DegenerateIteration,
    NotApplicable,
    PoleError,
    RootFindingError,
    UnsupportedMultiplicity,
)
from rootdyn.models import FixedPointInfo, NoAlgebraicSolution

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = mpmath.mpf("2.39996322972865332223")


def _guard() -> int:
    return get_config().precision.guard_digits


def _tol(digits: int) -> mpmath.mpf:
    return mpmath.mpf(10) ** (-digits / 2)


def format_complex(z, digits: int = 10) -> str:
    """a±bi with negligible parts dropped"""
    z = mpmath.mpc(z)
    re_part, im_part = z.real, z.imag
    if im_part == 0:
        return mpmath.nstr(re_part, digits)
    im_text = mpmath.nstr(abs(im_part), digits)
    if re_part == 0:
        return f"{'-' if im_part < 0 else ''}{im_text}i"
    return f"{mpmath.nstr(re_part, digits)}{'-' if im_part < 0 else '+'}{im_text}i"


@dataclass(frozen=True)
class Factor:
    """(x − root)^exponent"""
    root: mpmath.mpc
    exponent: mpmath.mpc


@dataclass(frozen=True)
class PolarTerm:
    """coeff/(x − root) inside the exponential"""
    root: mpmath.mpc
    coeff: mpmath.mpc


@dataclass(frozen=True)
class FactoredFunction:
    """h(x) = constant · ∏(x − rᵢ)^cᵢ · exp(exp_poly(x) + Σ bⱼ/(x − sⱼ))"""
    constant: mpmath.mpc
    factors: Tuple[Factor, ...]
    exp_poly: Tuple[mpmath.mpc, ...] = ()
    exp_poles: Tuple[PolarTerm, ...] = ()

    @property
    def roots(self) -> List[mpmath.mpc]:
        return [f.root for f in self.factors]

    @property
    def exponents(self) -> List[mpmath.mpc]:
        return [f.exponent for f in self.factors]

    def exponent_sum(self):
        return mpmath.fsum(self.exponents)

    def _exp_poly_value(self, x):
        acc = mpmath.mpc(0)
        for c in reversed(self.exp_poly):
            acc = acc * x + c
        return acc

    def _exp_poly_derivative(self, x):
        acc = mpmath.mpc(0)
        for k in range(len(self.exp_poly) - 1, 0, -1):
            acc = acc * x + k * self.exp_poly[k]
        return acc

    def log_derivative(self, x):
        """h'(x)/h(x), evaluated without forming any fractional power"""
        total = self._exp_poly_derivative(x)
        for f in self.factors:
            total += f.exponent / (x - f.root)
        for term in self.exp_poles:
            total -= term.coeff / (x - term.root) ** 2
        return total

    def log_value(self, x):
        """Principal-branch log h(x)"""
        total = mpmath.log(self.constant) + self._exp_poly_value(x)
        for f in self.factors:
            total += f.exponent * mpmath.log(x - f.root)
        for term in self.exp_poles:
            total += term.coeff / (x - term.root)
        return total

    def __call__(self, x):
        return mpmath.exp(self.log_value(x))

    def newton_step(self, x):
        """x − h(x)/h'(x)"""
        return x - 1 / self.log_derivative(x)

    def perturbed(self, index: int, delta) -> "FactoredFunction":
        """Copy with one exponent shifted by delta"""
        factors = list(self.factors)
        f = factors[index]
        factors[index] = Factor(f.root, f.exponent + delta)
        return replace(self, factors=tuple(factors))

    def __str__(self) -> str:
        parts = [format_complex(self.constant)]
        for f in self.factors:
            parts.append(f"(x - ({format_complex(f.root)}))^({format_complex(f.exponent)})")
        exp_terms = []
        if any(c != 0 for c in self.exp_poly):
            poly_terms = [
                f"({format_complex(c)})x^{k}" if k else f"({format_complex(c)})"
                for k, c in enumerate(self.exp_poly) if c != 0
            ]
            exp_terms.append(" + ".join(reversed(poly_terms)))
        for term in self.exp_poles:
            exp_terms.append(f"({format_complex(term.coeff)})/(x - ({format_complex(term.root)}))")
        if exp_terms:
            parts.append(f"exp({' + '.join(exp_terms)})")
        return " · ".join(parts)


def _roots(p: Poly, digits: int) -> List[mpmath.mpc]:
    """Distinct roots of p; repeated roots are found once, on the square-free part"""
    if p.degree < 1:
        return []
    g = poly_gcd(p, p.derivative())
    if g.degree >= 1:
        p = p // g
    with mpmath.workdps(digits):
        try:
            roots = mpmath.polyroots(
                p.descending_mp(),
                maxsteps=100 + 20 * p.degree,
                extraprec=2 * digits,
            )
        except mpmath.libmp.NoConvergence as e:
            raise RootFindingError(p.degree, str(e)) from e
        roots = [mpmath.mpc(r) for r in roots]
    return sorted(roots, key=lambda r: (float(r.real), float(r.imag)))


def _clean(z, digits: int):
    return mpmath.chop(z, tol=mpmath.mpf(10) ** (-digits))


def _normalisation_point(roots: Sequence, digits: int):
    tol = _tol(digits)
    x0 = 1
    while any(abs(x0 - r) < tol for r in roots):
        x0 += 1
    if x0 != 1:
        logger.warning(f"x = 1 is a root of x - H(x); normalising h at x = {x0}")
    return x0


def newton_disguise(H: RationalMap, digits: int = 40) -> FactoredFunction:
    """The function h whose Newton iteration is exactly H"""
    P = H.fixed_point_polynomial()
    if not P:
        raise DegenerateIteration("x - H(x) vanishes identically")
    if P.degree < 1:
        raise DegenerateIteration("x - H(x) has no roots to decompose over")

    quotient, remainder = divmod(H.den, P)
    g = poly_gcd(P, P.derivative())
    if g.degree >= 1:
        if poly_gcd(g, g.derivative()).degree >= 1:
            raise UnsupportedMultiplicity("x - H(x) has a root of multiplicity 3 or more")
        simple_part = (P // g) // g
    else:
        simple_part = P

    work = digits + _guard()
    dP = P.derivative()
    d2P = dP.derivative()
    d3P = d2P.derivative()
    dR = remainder.derivative()

    with mpmath.workdps(work):
        factors = []
        for r in _roots(simple_part, work):
            factors.append(Factor(r, _clean(remainder(r) / dP(r), digits)))

        poles = []
        for r in _roots(g, work):
            q0 = d2P(r) / 2
            q1 = d3P(r) / 6
            b = remainder(r) / q0
            a = (dR(r) * q0 - remainder(r) * q1) / q0 ** 2
            factors.append(Factor(r, _clean(a, digits)))
            poles.append(PolarTerm(r, _clean(-b, digits)))

        exp_poly = tuple(mpmath.mpc(to_mpf(c)) for c in quotient.integral().coeffs)
        draft = FactoredFunction(mpmath.mpc(1), tuple(factors), exp_poly, tuple(poles))
        x0 = _normalisation_point([f.root for f in factors], digits)
        constant = 1 / draft(mpmath.mpc(x0))
        h = replace(draft, constant=_clean(constant, digits))

    logger.info(f"disguise of {H}: {len(factors)} factors, {len(poles)} polar terms")
    return h


def residue_sum(H: RationalMap) -> Fraction:
    """Sum of residues of 1/(x − H(x)) at its finite poles, from leading coefficients alone"""
    P = H.fixed_point_polynomial()
    if not P or P.degree < 1:
        raise DegenerateIteration("x - H(x) has no roots to decompose over")
    remainder = H.den % P
    return remainder[P.degree - 1] / P.leading


def _sample_points(count: int, avoid: Sequence, tol) -> List[mpmath.mpc]:
    # golden-angle spiral over the annulus 0.35 <= |x| <= 3
    points = []
    j = 0
    while len(points) < count:
        radius = mpmath.mpf("0.35") + mpmath.mpf("2.65") * (j + mpmath.mpf("0.5")) / count
        x = radius * mpmath.expj(GOLDEN_ANGLE * j + mpmath.mpf("0.4"))
        j += 1
        if all(abs(x - r) > tol for r in avoid):
            points.append(x)
        if j > 10 * count:
            break
    return points


def verify_disguise(h: FactoredFunction, H: RationalMap, sample_count: int = 100, digits: int = 40):
    """max |x − h/h' − H(x)| over sample points away from roots and poles"""
    with mpmath.workdps(digits + _guard()):
        avoid = list(h.roots) + [t.root for t in h.exp_poles] + _roots(H.den, digits + _guard())
        max_error = mpmath.mpf(0)
        for x in _sample_points(sample_count, avoid, mpmath.mpf("1e-3")):
            try:
                target = eval_map(H, x)
            except PoleError:
                continue
            L = h.log_derivative(x)
            if L == 0:
                continue
            max_error = max(max_error, abs(x - 1 / L - target))
    return max_error


def _classify(magnitude, tol) -> Stability:
    if magnitude < tol:
        return Stability.SUPERATTRACTING
    if abs(magnitude - 1) < tol:
        return Stability.INDIFFERENT
    if magnitude < 1:
        return Stability.ATTRACTING
    return Stability.REPELLING


def fixed_points(G: RationalMap, digits: int = 40) -> List[FixedPointInfo]:
    """Finite fixed points of G with multiplier G'(x*) and stability class"""
    P = G.fixed_point_polynomial()
    if not P:
        raise DegenerateIteration("every point is fixed")
    square_free = P // poly_gcd(P, P.derivative())
    dG = G.derivative()
    tol = _tol(digits)
    work = digits + _guard()

    result = []
    with mpmath.workdps(work):
        for r in _roots(square_free, work):
            multiplier = _clean(eval_map(dG, r), digits)
            classification = _classify(abs(multiplier), tol)
            with mpmath.workdps(digits):
                result.append(FixedPointInfo(+_clean(r, digits), +multiplier, classification))
    for info in result:
        logger.debug(f"fixed point {info}")
    return result


def singularity_exponent(G: RationalMap, multiplier: int, digits: int = 40) -> Union[mpmath.mpf, NoAlgebraicSolution]:
    """
    α with S(θ) ~ θ^(-α) near a pole of S, when S(mθ) = G(S(θ)) and
    G(x) ~ λx at infinity: m^(-α) = λ, so α = −ln λ / ln m.
    """
    if G.num.degree != G.den.degree + 1:
        raise NotApplicable(f"need deg num = deg den + 1, got degrees {G.degrees}")
    if multiplier < 2:
        raise ValueError(f"multiplier must be >= 2, got {multiplier}")
    lam = G.leading_ratio()
    if lam <= 0:
        return NoAlgebraicSolution(lam, "m^(-α) = λ has no real solution for λ <= 0")
    if lam >= 1:
        return NoAlgebraicSolution(lam, "λ >= 1 forces α <= 0; α = 0 is the logarithmic case")
    with mpmath.workdps(digits):
        return -mpmath.log(to_mpf(lam)) / mpmath.log(multiplier)


def _rationalize(value, digits: int) -> Optional[Fraction]:
    value = mpmath.mpc(value)
    tol = _tol(digits)
    if abs(value.imag) > tol:
        return None
    guess = Fraction(mpmath.nstr(value.real, 20, min_fixed=-1000, max_fixed=1000)).limit_denominator(10 ** 6)
    if abs(value.real - to_mpf(guess)) > tol:
        return None
    return guess


def rational_factors(h: FactoredFunction, digits: int = 40) -> Optional[List[Tuple[Poly, Fraction]]]:
    """
    Regroup the factors of h into real polynomials with rational exponents,
    pairing conjugate roots into quadratics. None when some coefficient or
    exponent is not recognisably rational.
    """
    tol = _tol(digits)
    remaining = list(h.factors)
    groups: List[Tuple[Poly, Fraction]] = []

    with mpmath.workdps(digits):
        while remaining:
            f = remaining.pop(0)
            r = mpmath.mpc(f.root)
            if abs(r.imag) < tol:
                coeffs = [_rationalize(-r.real, digits), Fraction(1)]
            else:
                partner = next(
                    (g for g in remaining if abs(g.root - mpmath.conj(r)) < tol),
                    None,
                )
                if partner is None or abs(partner.exponent - mpmath.conj(f.exponent)) > tol:
                    return None
                remaining.remove(partner)
                coeffs = [_rationalize(abs(r) ** 2, digits), _rationalize(-2 * r.real, digits), Fraction(1)]
            exponent = _rationalize(f.exponent, digits)
            if exponent is None or any(c is None for c in coeffs):
                return None
            groups.append((Poly(tuple(coeffs)), exponent))

    groups.sort(key=lambda g: (g[0].degree, g[0].coeffs))
    return groups


def format_rational_factors(groups: Sequence[Tuple[Poly, Fraction]]) -> str:
    """'(x^2 + 1)^(1) · (5x^2 + 1)^(-1/5)' up to a constant factor"""
    return " · ".join(f"({format_poly(integer_primitive(p).coeffs)})^({e})" for p, e in groups)

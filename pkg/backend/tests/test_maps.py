import random
from fractions import Fraction

import mpmath
import pytest

from maps import (
    TARGET,
    GaussianPoly,
    Poly,
    RationalMap,
    cot_multiple_map,
    eval_map,
    format_poly,
    householder_map,
    integer_primitive,
    inv_f_derivative,
    iterate_map,
    poly_gcd,
    reversion_residual,
    schroeder_first_map,
    secant_step,
    series_revert,
)
from rootdyn.errors import NotInvertible, OrderNotImplemented, PoleError, SecantPoleError


def rmap(num, den):
    return RationalMap(Poly.of(*num), Poly.of(*den))


# ---------------------------------------------------------------------------
# Polynomials and rational maps
# ---------------------------------------------------------------------------

def test_poly_strips_trailing_zeros():
    p = Poly.of(1, 2, 0, 0)
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert Poly().degree == -1


def test_poly_divmod():
    q, r = divmod(Poly.of(1, 0, 0, 1), Poly.of(1, 1))
    assert q == Poly.of(1, -1, 1)
    assert not r


def test_poly_gcd_is_monic():
    a = Poly.of(-1, 0, 1) * 3
    b = Poly.of(1, 2, 1)
    assert poly_gcd(a, b) == Poly.of(1, 1)


def test_integer_primitive():
    p = Poly.of(Fraction(1, 5), 0, 1)
    assert integer_primitive(p) == Poly.of(1, 0, 5)
    assert integer_primitive(-p) == Poly.of(1, 0, 5)


def test_rational_map_canonical_form():
    G = rmap((-2, 0, 2), (0, 4))
    assert G.num == Poly.of(-1, 0, 1)
    assert G.den == Poly.of(0, 2)
    assert rmap((1,), (-2,)) == rmap((-1,), (2,))


def test_rational_map_reduces_common_factor():
    G = RationalMap(TARGET * Poly.of(1, 1), TARGET * Poly.of(2, 0, 1))
    assert G == rmap((1, 1), (2, 0, 1))


def test_rational_map_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RationalMap(Poly.of(1), Poly())


def test_rational_map_algebra():
    x = RationalMap.identity()
    assert x * x - 1 == rmap((-1, 0, 1), (1,))
    assert (x + 1) / (x - 1) == rmap((1, 1), (-1, 1))
    assert 1 / x == rmap((1,), (0, 1))
    assert x ** -2 == rmap((1,), (0, 0, 1))
    assert (x * x).derivative() == 2 * x


def test_compose():
    x = RationalMap.identity()
    inner = (x + 1) / x
    assert (x * x).compose(inner) == (x * x + 2 * x + 1) / (x * x)


def test_format_poly():
    assert format_poly((-1, 0, -6, 0, 3)) == "3x^4 - 6x^2 - 1"
    assert format_poly((0, Fraction(1, 2))) == "(1/2)x"
    assert format_poly(()) == "0"


def test_map_pretty_printing():
    assert str(schroeder_first_map(3)) == "(3x^4 - 6x^2 - 1)/(8x^3)"
    assert str(householder_map(1)) == "(x^2 - 1)/(2x)"
    assert str(householder_map(2)) == "(x^3 - 3x)/(3x^2 - 1)"


# ---------------------------------------------------------------------------
# Householder family
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,expected", [
    (0, rmap((1,), (1, 0, 1))),
    (1, RationalMap(Poly.of(0, -2), TARGET ** 2)),
    (2, RationalMap(Poly.of(-2, 0, 6), TARGET ** 3)),
])
def test_inverse_derivative(k, expected):
    assert inv_f_derivative(k).real == expected


@pytest.mark.parametrize("k", range(0, 13))
def test_imaginary_parts_cancel(k):
    gaussian = inv_f_derivative(k).gaussian
    assert gaussian.num.is_real
    assert gaussian.den.is_real


@pytest.mark.parametrize("k,expected", [
    (1, rmap((-1, 0, 1), (0, 2))),
    (2, rmap((0, -3, 0, 1), (-1, 0, 3))),
    (3, rmap((1, 0, -6, 0, 1), (0, -4, 0, 4))),
])
def test_householder_maps(k, expected):
    assert householder_map(k) == expected


@pytest.mark.parametrize("k", range(1, 9))
def test_householder_degrees_and_oddness(k):
    G = householder_map(k)
    assert G.degrees == (k + 1, k)
    assert G.is_odd()


@pytest.mark.parametrize("k", range(1, 7))
def test_householder_is_cot_multiple(k):
    assert householder_map(k) == cot_multiple_map(k + 1)


def test_two_newton_steps_are_fourth_order_householder():
    assert iterate_map(householder_map(1), 2) == householder_map(3)
    assert iterate_map(householder_map(1), 0) == RationalMap.identity()


@pytest.mark.parametrize("k", range(1, 9))
def test_householder_fixed_point_polynomial(k):
    P = householder_map(k).fixed_point_polynomial()
    cofactor, remainder = divmod(P, TARGET)
    assert not remainder
    # cofactor ∝ Im((x + i)^k), whose roots cot(jπ/k) are all real
    expected = (GaussianPoly.x_plus(0, 1) ** k).im
    assert integer_primitive(cofactor) == integer_primitive(expected)


def test_cot_multiple_map_values():
    with mpmath.workdps(40):
        theta = mpmath.mpf("0.3")
        value = eval_map(cot_multiple_map(5), mpmath.cot(theta))
        assert abs(value - mpmath.cot(5 * theta)) < mpmath.mpf(10) ** -30


# ---------------------------------------------------------------------------
# Series reversion and Schröder maps
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a,expected", [
    ((1, 0, 0), (1, 0, 0)),
    ((2, 1, 0), (Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16))),
    ((1, 1, 1), (1, -1, 1)),
])
def test_series_revert(a, expected):
    rev = series_revert(*a)
    assert (rev.A1, rev.A2, rev.A3) == expected


def test_series_revert_needs_linear_term():
    with pytest.raises(NotInvertible):
        series_revert(0, 1, 1)


def test_reversion_residual_vanishes():
    rng = random.Random(11)

    def coeff():
        return Fraction(rng.randint(-50, 50), rng.randint(1, 20))

    for _ in range(100):
        a1 = coeff() or Fraction(1)
        a2, a3 = coeff(), coeff()
        rev = series_revert(a1, a2, a3)
        assert reversion_residual(a1, a2, a3, rev) == (0, 0, 0)
        assert rev.A3 == -(a1 * a3 - 2 * a2 ** 2) / a1 ** 5


def test_schroeder_maps():
    assert schroeder_first_map(2) == householder_map(1)
    assert schroeder_first_map(3) == rmap((-1, 0, -6, 0, 3), (0, 0, 0, 8))
    assert schroeder_first_map(3)(1) == Fraction(-1, 2)


@pytest.mark.parametrize("order", [1, 4])
def test_schroeder_unsupported_orders(order):
    with pytest.raises(OrderNotImplemented):
        schroeder_first_map(order)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def test_secant_step_exact():
    assert secant_step(1, 1) == 0
    assert secant_step(2, 3) == 1


def test_secant_step_pole():
    with pytest.raises(SecantPoleError) as err:
        secant_step(1, -1)
    assert isinstance(err.value, PoleError)
    assert err.value.x_prev == 1


def test_secant_step_big_float():
    with mpmath.workdps(50):
        result = secant_step(1 + mpmath.sqrt(2), mpmath.mpf(0))
        assert abs(result - (1 - mpmath.sqrt(2))) < mpmath.mpf(10) ** -45


def test_eval_map():
    newton = householder_map(1)
    assert eval_map(newton, 1) == 0
    with pytest.raises(PoleError) as err:
        eval_map(newton, 0)
    assert err.value.point == 0


def test_halley_maps_root_three_to_zero():
    with mpmath.workdps(50):
        value = eval_map(householder_map(2), mpmath.sqrt(3))
        assert abs(value) < mpmath.mpf(10) ** -40


def test_eval_map_on_floats():
    assert eval_map(householder_map(1), 2.0) == pytest.approx(0.75)
    assert eval_map(householder_map(1), 1j) == pytest.approx(1j)

import random
from math import gcd

import mpmath
import pytest

from exactcore import classify_orbit, make_angle
from maps import eval_map, householder_map
from method_types import Basin, MethodKind
from oracle import (
    ComplexAngle,
    MethodSpec,
    closed_form_iterate,
    complex_theta,
    cot_hp,
    deviation_pair,
    direct_orbit,
    exact_angle,
    predict_basin,
    verify_theorem,
)
from rootdyn.errors import AtRoot, NoClosedForm, PoleError
from rootdyn.models import BlowUp


def reduced_angles(max_den):
    return [make_angle(p, q) for q in range(2, max_den + 1) for p in range(1, q) if gcd(p, q) == 1]


def tiny(exponent):
    return mpmath.mpf(10) ** exponent


# ---------------------------------------------------------------------------
# Method specs
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("text,kind,order,multiplier", [
    ("newton", MethodKind.HOUSEHOLDER, 1, 2),
    ("Halley", MethodKind.HOUSEHOLDER, 2, 3),
    ("householder:4", MethodKind.HOUSEHOLDER, 4, 5),
    ("secant", MethodKind.SECANT, None, None),
    ("schroeder3", MethodKind.SCHROEDER3, None, None),
])
def test_method_parse(text, kind, order, multiplier):
    spec = MethodSpec.parse(text)
    assert (spec.kind, spec.order, spec.multiplier) == (kind, order, multiplier)


@pytest.mark.parametrize("text", ["householder:0", "bisection", "householder:x", ""])
def test_method_parse_rejects(text):
    with pytest.raises(ValueError):
        MethodSpec.parse(text)


def test_method_str_round_trips():
    for text in ("newton", "halley", "householder:5", "secant", "schroeder3"):
        assert str(MethodSpec.parse(text)) == text


def test_secant_has_no_one_step_map():
    with pytest.raises(ValueError):
        MethodSpec.secant().iteration_map()


# ---------------------------------------------------------------------------
# Cotangent oracle
# ---------------------------------------------------------------------------

def test_cot_hp_examples():
    with mpmath.workdps(40):
        assert abs(cot_hp(make_angle(1, 4), 30) - 1) < tiny(-28)
        assert abs(cot_hp(make_angle(1, 3), 30) - mpmath.sqrt(3) / 3) < tiny(-28)
        assert abs(cot_hp(make_angle(1, 2), 30)) < tiny(-28)


def test_cot_hp_sign():
    assert cot_hp(make_angle(1, 5), 20) > 0
    assert cot_hp(make_angle(4, 5), 20) < 0


def test_cot_hp_pole():
    with pytest.raises(PoleError):
        cot_hp(make_angle(0, 1), 20)


def test_cot_hp_needs_digits():
    with pytest.raises(ValueError):
        cot_hp(make_angle(1, 3), 5)


def test_cot_hp_antisymmetry():
    rng = random.Random(3)
    with mpmath.workdps(50):
        for _ in range(50):
            t = mpmath.mpf(rng.uniform(0.01, 0.99))
            assert abs(cot_hp(t, 40) + cot_hp(1 - t, 40)) < tiny(-35) * (1 + abs(cot_hp(t, 40)))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def test_closed_form_newton_period_two():
    with mpmath.workdps(40):
        value = closed_form_iterate(MethodSpec.newton(), 2, make_angle(1, 3), digits=30)
        assert abs(value - mpmath.sqrt(3) / 3) < tiny(-28)


def test_closed_form_blowups(halley, secant):
    assert closed_form_iterate(halley, 2, make_angle(1, 9)) == BlowUp(2)
    assert closed_form_iterate(secant, 4, make_angle(1, 4), make_angle(1, 2)) == BlowUp(4)


def test_closed_form_has_no_schroeder_variant():
    with pytest.raises(NoClosedForm):
        closed_form_iterate(MethodSpec.schroeder3(), 1, make_angle(1, 3))


def test_exact_angle_reduces_before_evaluating(newton):
    assert exact_angle(newton, 200, make_angle(1, 3)) == make_angle(1 if 200 % 2 == 0 else 2, 3)
    far = closed_form_iterate(newton, 200, make_angle(1, 3), digits=30)
    near = closed_form_iterate(newton, 2, make_angle(1, 3), digits=30)
    assert far == near


def test_exact_angle_rejects_second_seed_for_one_step(newton):
    with pytest.raises(ValueError):
        exact_angle(newton, 1, make_angle(1, 3), make_angle(1, 5))


@pytest.mark.parametrize("method,t0,t1,n_max,digits,bound", [
    ("householder:3", (1, 7), None, 10, 60, -40),
    ("newton", (1, 3), None, 2, 50, -45),
    ("secant", (1, 8), (1, 2), 12, 60, -40),
])
def test_verify_theorem_examples(method, t0, t1, n_max, digits, bound):
    error = verify_theorem(
        MethodSpec.parse(method), make_angle(*t0), make_angle(*t1) if t1 else None, n_max, digits
    )
    assert error < tiny(bound)


def test_verify_theorem_reports_blowup(halley):
    with pytest.raises(PoleError):
        verify_theorem(halley, make_angle(1, 9), n_max=5, digits=40)


@pytest.mark.slow
def test_theorem_sweep_small_denominators():
    for k in range(1, 6):
        spec = MethodSpec.householder(k)
        for t in reduced_angles(30):
            verdict = classify_orbit(t, k + 1)
            if verdict.is_blowup and verdict.blowup_step <= 12:
                continue
            assert verify_theorem(spec, t, None, 12, 60) < tiny(-30), f"k={k}, t={t}"


def test_theorem_random_angles():
    angles = reduced_angles(50)
    rng = random.Random(1)
    for k in range(1, 6):
        spec = MethodSpec.householder(k)
        checked = 0
        while checked < 50:
            t = rng.choice(angles)
            verdict = classify_orbit(t, k + 1)
            if verdict.is_blowup and verdict.blowup_step <= 12:
                continue
            assert verify_theorem(spec, t, None, 12, 60) < tiny(-30), f"k={k}, t={t}"
            checked += 1


# ---------------------------------------------------------------------------
# Complex seeds
# ---------------------------------------------------------------------------

def test_complex_theta_real_seeds():
    with mpmath.workdps(40):
        one = complex_theta(1)
        assert abs(one.alpha - mpmath.pi / 4) < tiny(-35)
        assert one.beta == 0
        zero = complex_theta(0)
        assert abs(zero.alpha - mpmath.pi / 2) < tiny(-35)
        assert zero.beta == 0


def test_complex_theta_imaginary_axis():
    with mpmath.workdps(40):
        theta = complex_theta(mpmath.mpc(0, 3), digits=40)
        assert theta.beta < 0
        assert abs(mpmath.cot(theta.theta) - mpmath.mpc(0, 3)) < tiny(-30)


@pytest.mark.parametrize("seed", [2 + 3j, -1 + 0.5j, 0.3 - 2j, -4 - 0.01j])
def test_complex_theta_sign_relation(seed):
    with mpmath.workdps(40):
        theta = complex_theta(seed)
        assert 0 <= theta.alpha < mpmath.pi
        assert (theta.beta < 0) == (seed.imag > 0)
        assert abs(mpmath.cot(theta.theta) - seed) < tiny(-30)


@pytest.mark.parametrize("root", [1j, -1j])
def test_complex_theta_at_root(root):
    with pytest.raises(AtRoot):
        complex_theta(root)


def test_complex_angle_alpha_range():
    with pytest.raises(ValueError):
        ComplexAngle(mpmath.mpf(-1), mpmath.mpf(0))


def test_deviation_at_step_zero():
    theta = complex_theta(0.4 + 1.3j)
    pair = deviation_pair(1, 0, theta)
    with mpmath.workdps(40):
        assert abs(pair.plus - pair.minus - 2j) < tiny(-30)


def test_deviation_contracts_toward_plus_i():
    theta = complex_theta(1.5 + 0.2j)
    assert theta.beta < 0
    assert abs(deviation_pair(1, 5, theta).minus) < abs(deviation_pair(1, 3, theta).minus)


def test_deviation_matches_halley_iteration():
    digits = 50
    theta = complex_theta(mpmath.mpc(1, 1), digits)
    with mpmath.workdps(digits):
        orbit = direct_orbit(MethodSpec.halley(), mpmath.mpc(1, 1), 6)
        direct = orbit[6] - 1j
        assert abs(deviation_pair(2, 6, theta, digits).minus - direct) < tiny(-30)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_deviation_matches_direct_iteration(k):
    digits = 50
    seed = mpmath.mpc("0.5", "0.7")
    theta = complex_theta(seed, digits)
    with mpmath.workdps(digits):
        orbit = direct_orbit(MethodSpec.householder(k), seed, 8)
    for n in range(9):
        with mpmath.workdps(digits):
            direct = orbit[n] - 1j
            assert abs(deviation_pair(k, n, theta, digits).minus - direct) < tiny(10 - digits), f"k={k}, n={n}"


@pytest.mark.parametrize("seed,basin", [(2 + 3j, Basin.PLUS_I), (5 - 0.001j, Basin.MINUS_I), (7, Basin.REAL_LINE)])
def test_predict_basin(seed, basin):
    assert predict_basin(seed) is basin


def test_basin_prediction_matches_iteration():
    rng = random.Random(5)
    roots = {Basin.PLUS_I: mpmath.mpc(0, 1), Basin.MINUS_I: mpmath.mpc(0, -1)}
    with mpmath.workdps(30):
        for _ in range(100):
            imag = rng.uniform(0.01, 3.0) * rng.choice((-1, 1))
            seed = mpmath.mpc(rng.uniform(-3.0, 3.0), imag)
            basin = predict_basin(seed)
            for k in (1, 2, 3):
                G = householder_map(k)
                x = seed
                for _ in range(60):
                    x = eval_map(G, x)
                    if abs(x - roots[basin]) < tiny(-20):
                        break
                assert abs(x - roots[basin]) < tiny(-20), f"k={k}, seed={seed}"

import mpmath
import pytest

from exactcore import make_angle
from floatlab import (
    PrecisionConfig,
    angle_track,
    circular_distance,
    drift_report,
    iterate_float,
    precision_sweep,
    shift_digits,
)
from oracle import MethodSpec, cot_hp
from rootdyn.errors import NoClosedForm, NoOracle


def seed(t, prec):
    return prec.quantize(cot_hp(make_angle(*t), prec.decimal_digits + 20))


def test_precision_config_bounds():
    with pytest.raises(ValueError):
        PrecisionConfig(4)


def test_quantize_rounds_to_decimal_digits():
    with mpmath.workdps(30):
        q = PrecisionConfig(5).quantize(mpmath.pi)
    assert mpmath.nstr(q, 5) == "3.1416"
    assert mpmath.nstr(PrecisionConfig(8).quantize("1.234567891"), 8) == "1.2345679"


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

def test_newton_third_alternates(newton):
    report = drift_report(newton, make_angle(1, 3), 10, PrecisionConfig(32), 0.5)
    with mpmath.workdps(32):
        root = mpmath.sqrt(3) / 3
        for step in report.steps:
            sign = 1 if step.n % 2 == 0 else -1
            assert abs(step.float_value - sign * root) < mpmath.mpf("1e-20")
    assert report.steps[10].abs_error < mpmath.mpf("1e-25")
    assert report.first_tol_breach is None


def test_halley_blowup_becomes_large_value_decay(halley):
    prec = PrecisionConfig(32)
    orbit = iterate_float(halley, seed((1, 9), prec), 80, prec)
    assert orbit.pole is None
    with prec.context():
        assert abs(orbit[2]) > 10 ** 6
        assert abs(orbit[3] / orbit[2] - mpmath.mpf(1) / 3) < 0.01
        assert abs(orbit[4] / orbit[3] - mpmath.mpf(1) / 3) < 0.01
        n = 2
        while abs(orbit[n]) > 10 ** 3:
            assert abs(orbit[n + 1] / orbit[n] - mpmath.mpf(1) / 3) < 0.05
            n += 1


def test_newton_large_value_decay_halves():
    prec = PrecisionConfig(32)
    with prec.context():
        orbit = iterate_float(MethodSpec.newton(), mpmath.mpf("1e20"), 10, prec)
        for n in range(10):
            assert abs(orbit[n + 1] / orbit[n] - mpmath.mpf(1) / 2) < 0.05


def test_exact_pole_ends_orbit(newton):
    prec = PrecisionConfig(32)
    orbit = iterate_float(newton, seed((1, 4), prec), 5, prec)
    assert orbit.pole is not None
    assert orbit.pole.step == 2
    assert len(orbit) == 2


def test_every_step_is_rounded_to_decimal_digits(newton):
    orbit = iterate_float(newton, 3, 2, PrecisionConfig(5))
    assert mpmath.nstr(orbit[1], 10) == "1.3333"
    for x in orbit.values:
        assert len(mpmath.nstr(x, 12).lstrip("-0.").replace(".", "")) <= 5


def test_complex_seeds_are_rejected(newton):
    with pytest.raises(ValueError):
        iterate_float(newton, mpmath.mpc(1, 1), 3, PrecisionConfig(20))


def test_secant_needs_two_seeds(secant):
    with pytest.raises(ValueError):
        iterate_float(secant, 1, 5, PrecisionConfig(20))


def test_spurious_zero_escapes(halley):
    prec = PrecisionConfig(32)
    with mpmath.workdps(50):
        x0 = prec.quantize(mpmath.sqrt(3))
    assert mpmath.nstr(x0, 32) == "1.7320508075688772935274463415059"
    orbit = iterate_float(halley, x0, 500, prec)
    assert orbit.pole is None
    assert all(abs(orbit[n]) < mpmath.mpf("1e-10") for n in range(1, 11))
    assert any(abs(x) > mpmath.mpf("0.1") for x in orbit.values[11:])


def test_secant_float_orbit_follows_period_twelve(secant):
    report = drift_report(secant, make_angle(1, 8), 24, PrecisionConfig(40), 0.5, make_angle(1, 2))
    assert len(report) == 25
    assert all(step.abs_error < mpmath.mpf("1e-20") for step in report.steps)


# ---------------------------------------------------------------------------
# Drift experiments
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("digits", [16, 64])
def test_newton_periodicity_destroyed(newton, digits):
    report = drift_report(newton, make_angle(1, 3), 300, PrecisionConfig(digits), 0.5)
    assert report.first_period_failure is not None
    assert report.first_period_failure <= 300
    assert report.first_tol_breach is not None


def test_more_digits_delay_the_failure(newton):
    failures = precision_sweep(newton, make_angle(1, 3), [16, 64], 300, 0.5)
    assert None not in failures.values()
    assert failures[16] < failures[64]


def test_newton_third_settles_on_a_rounded_two_cycle(newton):
    report = drift_report(newton, make_angle(1, 3), 300, PrecisionConfig(32), 0.5)
    assert report.first_period_failure is None


def test_halley_seventh_loses_period(halley):
    report = drift_report(halley, make_angle(1, 7), 200, PrecisionConfig(32), 0.5)
    assert report.first_period_failure is not None
    assert report.first_period_failure <= 100


def test_halley_eighth_keeps_period_early(halley):
    report = drift_report(halley, make_angle(1, 8), 20, PrecisionConfig(32), 0.5)
    assert report.first_period_failure is None
    assert all(step.abs_error < mpmath.mpf("1e-10") for step in report.steps)


def test_halley_eighth_keeps_period_for_200_steps(halley):
    report = drift_report(halley, make_angle(1, 8), 200, PrecisionConfig(32), 0.5)
    assert report.first_period_failure is None


@pytest.mark.parametrize("method,t,m", [("newton", (1, 3), 2), ("halley", (1, 7), 3)])
def test_error_growth_envelope(method, t, m):
    digits = 32
    report = drift_report(MethodSpec.parse(method), make_angle(*t), 120, PrecisionConfig(digits), 0.5)
    checked = 0
    for step in report.steps:
        if step.abs_error > mpmath.mpf("1e-3"):
            break
        assert step.abs_error <= 100 * mpmath.mpf(m) ** step.n * mpmath.mpf(10) ** -digits, f"n={step.n}"
        checked += 1
    assert checked > 20


def test_blowup_orbit_has_no_oracle_after_blowup(newton):
    report = drift_report(newton, make_angle(1, 4), 5, PrecisionConfig(32), 0.5)
    assert report.pole_step == 2
    assert [s.oracle_value is not None for s in report.steps] == [True, True]


def test_drift_report_needs_oracle():
    with pytest.raises(NoOracle):
        drift_report(MethodSpec.schroeder3(), make_angle(1, 3), 10, PrecisionConfig(32), 0.5)


def test_drift_report_frame(newton):
    frame = drift_report(newton, make_angle(1, 3), 5, PrecisionConfig(32), 0.5).to_frame()
    assert list(frame.columns) == ["n", "float_value", "oracle_value", "abs_error"]
    assert len(frame) == 6
    assert frame["float_value"].iloc[1] == pytest.approx(-0.5773502691896258)


# ---------------------------------------------------------------------------
# Angle tracks
# ---------------------------------------------------------------------------

def test_irrational_angle_follows_ternary_shift(halley):
    prec = PrecisionConfig(40)
    with prec.context():
        t0 = mpmath.sqrt(2) / 2
    track = angle_track(halley, t0, 15, prec)
    assert "".join(str(d) for d in shift_digits(track, 3)) == "2010021102221121"


def test_dyadic_angle_track(newton):
    track = angle_track(newton, mpmath.mpf("0.25"), 2, PrecisionConfig(20))
    assert track == [mpmath.mpf("0.25"), mpmath.mpf("0.5"), 0]


def test_float_third_drifts_under_tripling(halley):
    prec = PrecisionConfig(40)
    with prec.context():
        t0 = mpmath.mpf("0." + "3" * 40)
    track = angle_track(halley, t0, 133, prec)
    assert any(circular_distance(t, 0) > 0.1 for t in track[1:])


def test_secant_angle_track(secant):
    track = angle_track(secant, mpmath.mpf("0.25"), 4, PrecisionConfig(20), mpmath.mpf("0.5"))
    assert track == [mpmath.mpf("0.25"), mpmath.mpf("0.5"), mpmath.mpf("0.75"), mpmath.mpf("0.25"), 0]


def test_schroeder_has_no_angle_track():
    with pytest.raises(NoClosedForm):
        angle_track(MethodSpec.schroeder3(), mpmath.mpf("0.1"), 3, PrecisionConfig(20))


def test_circular_distance():
    assert float(circular_distance(mpmath.mpf("0.95"), mpmath.mpf("0.05"))) == pytest.approx(0.1)

"""
Command-line entry point for the root-dynamics toolkit
File: main.py

Subcommands bind the exact, float, disguise and rendering layers into
reproducible experiments:

    python main.py classify --method halley --theta 1/7
    python main.py verify --method householder:4 --theta 3/11 --steps 12 --digits 60
    python main.py drift --method newton --theta 1/3 --steps 300 --csv newton.csv
    python main.py render --map schroeder3 --cols 256 --rows 256 --out basins.ppm
"""

import logging
import os
import re
import sys
import time
from dataclasses import dataclass
from math import gcd
from typing import Any, List, Optional, Sequence, Union

import click
import mpmath
import pandas as pd
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)
from tqdm import tqdm

from disguise import (
    fixed_points,
    format_rational_factors,
    newton_disguise,
    rational_factors,
    residue_sum,
    singularity_exponent,
    verify_disguise,
)
from exactcore import (
    RationalAngle,
    classify_orbit,
    classify_secant_orbit,
    digits as expand_digits,
    make_angle,
    secant_blowup_step,
)
from floatlab import (
    PrecisionConfig,
    angle_track,
    drift_report,
    iterate_float,
    precision_sweep,
    shift_digits,
    write_csv,
)
from fractal import GridSpec, render, write_ppm
from method_types import MethodKind
from oracle import MethodSpec, cot_hp, verify_theorem
from rootdyn.config import Config, get_config, reload_config
from rootdyn.errors import AngleParseError, ChaosError, InvalidAngle
from rootdyn.models import DriftReport, DriftStep, NoAlgebraicSolution, SweepStats

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def configure_logging(level: str = "WARNING", log_file: Optional[str] = None):
    """Root logger setup: stderr always, plus a log file when configured"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


# ============================================================================
# Angle parsing
# ============================================================================

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*/\s*(-?\d+)\s*$")
_SQRT_RE = re.compile(r"^\s*sqrt\s*(\d+)\s*(?:/\s*(\d+))?\s*$", re.IGNORECASE)
_DECIMAL_RE = re.compile(r"^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$")


def parse_angle(text: str, digits: int = 32) -> Union[RationalAngle, mpmath.mpf]:
    """
    'p/q' -> exact RationalAngle (the angle p·π/q); a decimal or 'sqrtN/q'
    -> big-float fraction of π at the session precision.
    """
    match = _RATIONAL_RE.match(text)
    if match:
        try:
            return make_angle(int(match.group(1)), int(match.group(2)))
        except InvalidAngle as e:
            raise AngleParseError(f"invalid angle '{text}': {e}") from e

    match = _SQRT_RE.match(text)
    if match:
        radicand = int(match.group(1))
        divisor = int(match.group(2) or 1)
        if divisor == 0:
            raise AngleParseError(f"invalid angle '{text}': zero divisor")
        with mpmath.workdps(digits):
            return mpmath.sqrt(radicand) / divisor

    if _DECIMAL_RE.match(text):
        with mpmath.workdps(digits):
            return mpmath.mpf(text.strip())

    raise AngleParseError(f"malformed angle '{text}' (expected p/q, a decimal, or sqrtN/q)")


# ============================================================================
# Command models (validated before any computation)
# ============================================================================

class CommandModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    digits: int = Field(ge=10, le=10_000)


class MethodCommand(CommandModel):
    method: MethodSpec
    theta: Any = None
    theta1: Any = None

    @field_validator("method", mode="before")
    @classmethod
    def _parse_method(cls, value):
        if isinstance(value, MethodSpec):
            return value
        return MethodSpec.parse(str(value))

    @model_validator(mode="after")
    def _check_seeds(self):
        if self.method.is_two_point and self.theta1 is None:
            raise ValueError("the secant method needs --theta1")
        if not self.method.is_two_point and self.theta1 is not None:
            raise ValueError("--theta1 only applies to the secant method")
        return self


class ClosedFormCommand(MethodCommand):
    """Commands that need the cotangent closed form of the method"""

    @model_validator(mode="after")
    def _check_closed_form(self):
        if self.method.kind is MethodKind.SCHROEDER3:
            raise ValueError(f"--method {self.method} has no exact angle dynamics; use iterate or disguise")
        return self


class ExactAngleCommand(ClosedFormCommand):
    @model_validator(mode="after")
    def _check_rational(self):
        for name in ("theta", "theta1"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, RationalAngle):
                raise ValueError(f"--{name} must be an exact p/q angle for this command")
        if self.theta is None:
            raise ValueError("--theta is required")
        return self


class IterateCommand(MethodCommand):
    steps: int = Field(ge=0, le=1_000_000)
    x0: Any = None
    x1: Any = None
    angles: bool = False

    @field_validator("x0", "x1", mode="before")
    @classmethod
    def _parse_value(cls, value, info: ValidationInfo):
        if value is None or isinstance(value, mpmath.mpf):
            return value
        text = str(value).strip()
        if not _DECIMAL_RE.match(text):
            raise ValueError(f"--{info.field_name} must be a real number, got '{value}'")
        with mpmath.workdps(info.data.get("digits", 32) + 10):
            return mpmath.mpf(text)

    @model_validator(mode="after")
    def _check_seeds(self):
        # replaces the angle-only check: seeds come as angles or as values
        if (self.theta is None) == (self.x0 is None):
            raise ValueError("give exactly one of --theta or --x0")
        if self.theta is not None and self.x1 is not None:
            raise ValueError("--x1 pairs with --x0, not with --theta")
        if self.x0 is not None and self.theta1 is not None:
            raise ValueError("--theta1 pairs with --theta, not with --x0")
        second = self.theta1 if self.theta is not None else self.x1
        if self.method.is_two_point and second is None:
            raise ValueError("the secant method needs a second seed (--theta1 or --x1)")
        if not self.method.is_two_point and second is not None:
            raise ValueError("--theta1 and --x1 only apply to the secant method")
        if self.angles and self.theta is None:
            raise ValueError("--angles needs --theta")
        return self


class ClassifyCommand(ExactAngleCommand):
    pass


class ExpandCommand(CommandModel):
    theta: RationalAngle
    base: int = Field(ge=2, le=36)
    max_len: Optional[int] = Field(default=None, ge=1)


class DriftCommand(ExactAngleCommand):
    steps: int = Field(ge=1, le=1_000_000)
    tol: float = Field(gt=0)
    sweep: Optional[List[int]] = None

    @field_validator("sweep")
    @classmethod
    def _check_sweep(cls, value):
        if value is not None and any(d < 10 for d in value):
            raise ValueError("sweep precisions must be >= 10 digits")
        return value


class VerifyCommand(ClosedFormCommand):
    steps: int = Field(ge=0, le=100_000)
    sweep_den: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _check_target(self):
        if self.sweep_den is None:
            if not isinstance(self.theta, RationalAngle):
                raise ValueError("--theta must be an exact p/q angle")
            if self.theta1 is not None and not isinstance(self.theta1, RationalAngle):
                raise ValueError("--theta1 must be an exact p/q angle")
        elif self.method.kind is not MethodKind.HOUSEHOLDER:
            raise ValueError("--sweep-den is available for Householder methods only")
        return self


class DisguiseCommand(CommandModel):
    map: MethodSpec
    samples: int = Field(ge=1, le=100_000)
    multiplier: Optional[int] = Field(default=None, ge=2)

    @field_validator("map", mode="before")
    @classmethod
    def _parse_map(cls, value):
        spec = value if isinstance(value, MethodSpec) else MethodSpec.parse(str(value))
        if spec.is_two_point:
            raise ValueError("the secant method is not a one-step map")
        return spec


class RenderCommand(DisguiseCommand):
    samples: int = 1
    center: complex
    width: float = Field(gt=0)
    height: float = Field(gt=0)
    cols: int = Field(ge=1)
    rows: int = Field(ge=1)
    max_iter: int = Field(ge=1)
    tol: float = Field(gt=0)
    out: str
    shade: bool = False
    workers: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_budget(self):
        budget = get_config().render.max_pixels
        if self.cols * self.rows > budget:
            raise ValueError(f"{self.cols}x{self.rows} pixels exceed the budget of {budget}")
        return self


# ============================================================================
# Session
# ============================================================================

@dataclass
class Session:
    digits: int
    config: Config
    color: Optional[bool]

    def heading(self, text: str):
        click.secho(text, bold=True, color=self.color)

    def angle(self, text: Optional[str]):
        if text is None:
            return None
        return parse_angle(text, self.digits)


def _seed(session: Session, prec: PrecisionConfig, theta):
    """cot(θ) rounded to the working digits"""
    guard = session.config.precision.oracle_guard_digits
    return prec.quantize(cot_hp(theta, prec.decimal_digits + guard))


def _parse_center(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise click.BadParameter(f"expected 'a,b', got '{text}'", param_hint="--center")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise click.BadParameter(f"expected 'a,b', got '{text}'", param_hint="--center") from e


def _parse_sweep(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated digit counts, got '{text}'", param_hint="--sweep") from e


# ============================================================================
# CLI
# ============================================================================

@click.group()
@click.option("--digits", type=int, default=None, help="Working precision in decimal digits (default 32).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="YAML configuration file.")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Logging level (default from configuration).")
@click.pass_context
def cli(ctx: click.Context, digits: Optional[int], config_path: Optional[str], log_level: Optional[str]):
    """Exact and finite-precision dynamics of root-finding iterations on x² + 1."""
    try:
        config = reload_config(config_path) if config_path else get_config()
    except ValueError as e:
        raise click.UsageError(f"invalid configuration: {e}") from e
    configure_logging(log_level or config.logging.level, config.logging.log_file)
    color = False if os.environ.get("NO_COLOR") else None
    ctx.obj = Session(digits=digits or config.precision.default_digits, config=config, color=color)


@cli.command()
@click.option("--method", required=True, help="newton | halley | householder:k | secant | schroeder3")
@click.option("--theta", default=None, help="Seed angle as a fraction of π: p/q, decimal, or sqrtN/q.")
@click.option("--theta1", default=None, help="Second seed angle (secant).")
@click.option("--x0", default=None, help="Seed value instead of an angle.")
@click.option("--x1", default=None, help="Second seed value (secant).")
@click.option("--steps", type=int, default=20, show_default=True)
@click.option("--angles", is_flag=True, help="Also print the floating-point angle track.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_obj
def iterate(session: Session, method, theta, theta1, x0, x1, steps, angles, csv_path):
    """Iterate a method at the session precision."""
    cmd = IterateCommand(
        digits=session.digits, method=method, theta=session.angle(theta), theta1=session.angle(theta1),
        x0=x0, x1=x1, steps=steps, angles=angles,
    )
    prec = PrecisionConfig(cmd.digits)
    if cmd.theta is not None:
        start = _seed(session, prec, cmd.theta)
        second = _seed(session, prec, cmd.theta1) if cmd.theta1 is not None else None
    else:
        start, second = cmd.x0, cmd.x1

    orbit = iterate_float(cmd.method, start, cmd.steps, prec, second)
    for n, x in enumerate(orbit):
        click.echo(f"{n:>5}  {mpmath.nstr(x, cmd.digits)}")
    if orbit.pole is not None:
        click.echo(f"pole: denominator vanished computing x_{orbit.pole.step}")

    if cmd.angles:
        track = angle_track(cmd.method, cmd.theta, cmd.steps, prec, cmd.theta1)
        base = cmd.method.multiplier or 2
        session.heading("angle track (θ/π mod 1)")
        for n, (t, d) in enumerate(zip(track, shift_digits(track, base))):
            click.echo(f"{n:>5}  {mpmath.nstr(t, cmd.digits)}  digit {d}")

    if csv_path:
        report = DriftReport(method=str(cmd.method), digits=cmd.digits, oracle_digits=cmd.digits, tol=0.0,
                             steps=[DriftStep(n, x) for n, x in enumerate(orbit)])
        write_csv(report, csv_path)


@cli.command()
@click.option("--method", required=True)
@click.option("--theta", required=True)
@click.option("--theta1", default=None)
@click.pass_obj
def classify(session: Session, method, theta, theta1):
    """Exact orbit verdict, with the base-m expansion for Householder maps."""
    cmd = ClassifyCommand(digits=session.digits, method=method, theta=session.angle(theta),
                          theta1=session.angle(theta1))
    m = cmd.method
    if m.is_two_point:
        verdict = classify_secant_orbit(cmd.theta, cmd.theta1)
        bound = verdict.blowup_step if verdict.is_blowup else verdict.preperiod + verdict.period
        step = secant_blowup_step(cmd.theta, cmd.theta1, bound)
        click.echo(f"{verdict}    fibonacci blow-up step: {step if step is not None else 'none'}")
    else:
        verdict = classify_orbit(cmd.theta, m.multiplier)
        expansion = expand_digits(cmd.theta, m.multiplier, cmd.theta.den + 1)
        click.echo(f"{verdict}    base-{m.multiplier} {expansion}")
    if verdict.contains_zero_iterate():
        click.echo("orbit passes through x = 0")


@cli.command()
@click.option("--theta", required=True, help="Exact angle p/q.")
@click.option("--base", type=int, default=3, show_default=True)
@click.option("--max-len", type=int, default=None)
@click.pass_obj
def expand(session: Session, theta, base, max_len):
    """Radix expansion of an exact angle."""
    angle = session.angle(theta)
    if not isinstance(angle, RationalAngle):
        raise click.BadParameter("needs an exact p/q angle", param_hint="--theta")
    cmd = ExpandCommand(digits=session.digits, theta=angle, base=base, max_len=max_len)
    expansion = expand_digits(cmd.theta, cmd.base, cmd.max_len or cmd.theta.den + 1)
    click.echo(f"{cmd.theta} = {expansion} (base {cmd.base}; prefix {len(expansion.prefix)}, "
               f"repetend {len(expansion.repetend)})")


@cli.command()
@click.option("--method", required=True)
@click.option("--theta", required=True)
@click.option("--theta1", default=None)
@click.option("--steps", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, writable=True), default=None)
@click.option("--sweep", default=None, help="Comma-separated precisions, e.g. 16,32,64.")
@click.pass_obj
def drift(session: Session, method, theta, theta1, steps, tol, csv_path, sweep):
    """Finite-precision orbit against the exact oracle."""
    cmd = DriftCommand(
        digits=session.digits, method=method, theta=session.angle(theta), theta1=session.angle(theta1),
        steps=steps if steps is not None else session.config.drift.default_steps,
        tol=tol if tol is not None else session.config.drift.tol,
        sweep=_parse_sweep(sweep),
    )
    report = drift_report(cmd.method, cmd.theta, cmd.steps, PrecisionConfig(cmd.digits), cmd.tol, cmd.theta1)
    session.heading(str(report))
    click.echo(report.to_frame().tail(5).to_string(index=False))
    if csv_path:
        write_csv(report, csv_path)
        click.echo(f"wrote {len(report)} rows to {csv_path}")

    if cmd.sweep:
        failures = precision_sweep(cmd.method, cmd.theta, cmd.sweep, cmd.steps, cmd.tol, cmd.theta1)
        table = pd.DataFrame({"digits": list(failures), "first_period_failure": list(failures.values())})
        session.heading("precision sweep")
        click.echo(table.to_string(index=False))


def _reduced_angles(max_den: int) -> List[RationalAngle]:
    return [make_angle(p, q) for q in range(2, max_den + 1) for p in range(1, q) if gcd(p, q) == 1]


@cli.command()
@click.option("--method", required=True)
@click.option("--theta", default=None)
@click.option("--theta1", default=None)
@click.option("--steps", type=int, default=12, show_default=True)
@click.option("--sweep-den", type=int, default=None, help="Verify every reduced angle with this maximal denominator.")
@click.pass_obj
def verify(session: Session, method, theta, theta1, steps, sweep_den):
    """Compare direct iteration with the cotangent closed form."""
    cmd = VerifyCommand(digits=session.digits, method=method, theta=session.angle(theta),
                        theta1=session.angle(theta1), steps=steps, sweep_den=sweep_den)
    if cmd.sweep_den is None:
        error = verify_theorem(cmd.method, cmd.theta, cmd.theta1, cmd.steps, cmd.digits)
        click.echo(f"max oracle error: {mpmath.nstr(error, 6)}")
        return

    stats = SweepStats()
    started = time.perf_counter()
    for t in tqdm(_reduced_angles(cmd.sweep_den), desc="verify", unit="angle", file=sys.stderr, disable=None):
        stats.total += 1
        verdict = classify_orbit(t, cmd.method.multiplier)
        if verdict.is_blowup and verdict.blowup_step <= cmd.steps:
            stats.skipped_blowups += 1
            continue
        error = verify_theorem(cmd.method, t, None, cmd.steps, cmd.digits)
        stats.verified += 1
        if error >= stats.max_error:
            stats.max_error, stats.worst_angle = error, str(t)
    stats.duration_seconds = time.perf_counter() - started
    stats.max_error = mpmath.nstr(stats.max_error, 6)
    click.echo(str(stats))


@cli.command()
@click.option("--map", "map_name", required=True, help="newton | halley | householder:k | schroeder3")
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--multiplier", type=int, default=None, help="Angle multiplier m for the singularity exponent.")
@click.pass_obj
def disguise(session: Session, map_name, samples, multiplier):
    """Newton function of a one-step map, fixed points and singularity exponent."""
    cmd = DisguiseCommand(digits=session.digits, map=map_name, samples=samples, multiplier=multiplier)
    H = cmd.map.iteration_map()
    m = cmd.multiplier or cmd.map.multiplier or 3

    h = newton_disguise(H, cmd.digits)
    session.heading(f"map: {H}")
    groups = rational_factors(h, cmd.digits)
    if groups is not None:
        click.echo(f"newton function: {format_rational_factors(groups)}")
    click.echo(f"h(x) = {h}")
    residual = verify_disguise(h, H, cmd.samples, cmd.digits)
    click.echo(f"residual over {cmd.samples} points: {mpmath.nstr(residual, 6)}")
    click.echo(f"residue sum: {residue_sum(H)} (exponent sum {mpmath.nstr(h.exponent_sum(), 12)})")

    session.heading("fixed points")
    for info in fixed_points(H, cmd.digits):
        click.echo(f"  x = {mpmath.nstr(info.location, 12)}  G'(x) = {mpmath.nstr(info.multiplier, 12)}"
                   f"  ({info.classification.value})")

    try:
        alpha = singularity_exponent(H, m, cmd.digits)
    except ChaosError as e:
        click.echo(f"singularity exponent: not applicable ({e})")
    else:
        if isinstance(alpha, NoAlgebraicSolution):
            click.echo(f"singularity exponent (m={m}): {alpha}")
        else:
            click.echo(f"singularity exponent (m={m}): {mpmath.nstr(alpha, 12)}")


@cli.command(name="render")
@click.option("--map", "map_name", required=True)
@click.option("--center", default=None, help="Viewport centre as a,b (default from configuration).")
@click.option("--width", type=float, default=None)
@click.option("--height", type=float, default=None)
@click.option("--cols", type=int, default=None)
@click.option("--rows", type=int, default=None)
@click.option("--max-iter", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--shade", is_flag=True, help="Darken pixels by iteration count.")
@click.option("--workers", type=int, default=None)
@click.pass_obj
def render_command(session: Session, map_name, center, width, height, cols, rows, max_iter, tol, out, shade, workers):
    """Basins of attraction of ±i as a binary PPM."""
    defaults = session.config.render
    cmd = RenderCommand(
        digits=session.digits, map=map_name, center=_parse_center(center) if center else defaults.center,
        width=width if width is not None else defaults.width,
        height=height if height is not None else defaults.height,
        cols=cols if cols is not None else defaults.cols,
        rows=rows if rows is not None else defaults.rows,
        max_iter=max_iter if max_iter is not None else defaults.max_iter,
        tol=tol if tol is not None else defaults.tol,
        out=out, shade=shade, workers=workers,
    )
    grid = GridSpec(cmd.center, cmd.width, cmd.height, cmd.cols, cmd.rows)
    image = render(cmd.map.iteration_map(), grid, (1j, -1j), cmd.max_iter, cmd.tol, cmd.workers)
    write_ppm(image, defaults.palette, cmd.out, shade=cmd.shade)
    counts = image.counts()
    click.echo(f"{cmd.cols}x{cmd.rows}: +i {counts.get(0, 0)}, -i {counts.get(1, 0)}, "
               f"non-convergent {counts.get(-1, 0)} -> {cmd.out}")


# ============================================================================
# Main Entry Point
# ============================================================================

def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; 0 on success, 2 on flag errors, 1 on computational errors"""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="rootdyn",
                          standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except (ValidationError, AngleParseError) as e:
        click.echo(f"Error: {e}", err=True)
        return 2
    except ChaosError as e:
        click.echo(f"Error: {e}", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())

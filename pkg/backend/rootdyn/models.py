"""
Data models for orbit verdicts, expansions and experiment reports
File: models.py
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional

import pandas as pd

from method_types import OrbitKind, Stability

DIGIT_SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class OrbitClass:
    """Verdict for a rational-angle orbit: blow-up step, or preperiod plus prime period"""
    kind: OrbitKind
    blowup_step: Optional[int] = None
    preperiod: Optional[int] = None
    period: Optional[int] = None

    # Whether some iterate angle is 1/2 (x = 0); not part of the verdict identity
    zero_iterate: Optional[bool] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind is OrbitKind.BLOWS_UP:
            if self.blowup_step is None or self.blowup_step < 0:
                raise ValueError(f"blow-up verdict needs a step >= 0, got {self.blowup_step}")
            if self.preperiod is not None or self.period is not None:
                raise ValueError("blow-up verdict cannot carry preperiod/period")
        else:
            if self.blowup_step is not None:
                raise ValueError("periodic verdict cannot carry a blow-up step")
            if self.preperiod is None or self.preperiod < 0:
                raise ValueError(f"preperiod must be >= 0, got {self.preperiod}")
            if self.period is None or self.period < 1:
                raise ValueError(f"period must be >= 1, got {self.period}")

    @classmethod
    def blows_up(cls, step: int, zero_iterate: Optional[bool] = None) -> "OrbitClass":
        return cls(OrbitKind.BLOWS_UP, blowup_step=step, zero_iterate=zero_iterate)

    @classmethod
    def eventually_periodic(cls, preperiod: int, period: int, zero_iterate: Optional[bool] = None) -> "OrbitClass":
        return cls(OrbitKind.EVENTUALLY_PERIODIC, preperiod=preperiod, period=period, zero_iterate=zero_iterate)

    @property
    def is_blowup(self) -> bool:
        return self.kind is OrbitKind.BLOWS_UP

    def contains_zero_iterate(self) -> bool:
        """True when the orbit passes through angle 1/2, the spurious zero x = 0"""
        if self.zero_iterate is None:
            raise ValueError("zero-iterate information was not computed for this verdict")
        return self.zero_iterate

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "blowup_step": self.blowup_step,
            "preperiod": self.preperiod,
            "period": self.period,
            "zero_iterate": self.zero_iterate,
        }

    def __str__(self) -> str:
        if self.is_blowup:
            return f"blows up at step {self.blowup_step}"
        return f"eventually periodic, preperiod {self.preperiod}, period {self.period}"


def _is_primitive(word: tuple) -> bool:
    # w is a proper power iff it occurs inside ww with both ends trimmed
    if len(word) <= 1:
        return True
    doubled = word + word
    n = len(word)
    return not any(doubled[i:i + n] == word for i in range(1, n))


@dataclass(frozen=True)
class DigitExpansion:
    """Radix expansion 0.prefix(repetend) of a fraction in [0, 1)"""
    base: int
    prefix: tuple[int, ...] = ()
    repetend: tuple[int, ...] = ()

    def __post_init__(self):
        if not 2 <= self.base <= len(DIGIT_SYMBOLS):
            raise ValueError(f"base must be in [2, {len(DIGIT_SYMBOLS)}], got {self.base}")
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "repetend", tuple(self.repetend))
        for d in self.prefix + self.repetend:
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} out of range for base {self.base}")
        if not _is_primitive(self.repetend):
            raise ValueError(f"repetend {self.repetend} is not primitive")

    @property
    def is_terminating(self) -> bool:
        return not self.repetend

    @property
    def prefix_str(self) -> str:
        return "".join(DIGIT_SYMBOLS[d] for d in self.prefix)

    @property
    def repetend_str(self) -> str:
        return "".join(DIGIT_SYMBOLS[d] for d in self.repetend)

    def to_fraction(self) -> Fraction:
        """Rebuild the exact fraction the expansion denotes"""
        b = self.base
        head = 0
        for d in self.prefix:
            head = head * b + d
        value = Fraction(head)
        if self.repetend:
            cycle = 0
            for d in self.repetend:
                cycle = cycle * b + d
            value += Fraction(cycle, b ** len(self.repetend) - 1)
        return value / b ** len(self.prefix)

    def __str__(self) -> str:
        if not self.prefix and not self.repetend:
            return "0"
        text = f"0.{self.prefix_str}"
        if self.repetend:
            text += f"({self.repetend_str})"
        return text


@dataclass(frozen=True)
class BlowUp:
    """Predicted blow-up: the exact iterate angle is 0, so x_n is undefined"""
    step: int

    def __str__(self) -> str:
        return f"BlowUp(step={self.step})"


@dataclass(frozen=True)
class NoAlgebraicSolution:
    """The leading ratio forces no algebraic singularity exponent"""
    ratio: Fraction
    reason: str

    def __str__(self) -> str:
        return f"no algebraic solution (leading ratio {self.ratio}): {self.reason}"


@dataclass
class DriftStep:
    """One row of a drift experiment"""
    n: int
    float_value: Any
    oracle_value: Any = None
    abs_error: Any = None

    def __post_init__(self):
        if (self.oracle_value is None) != (self.abs_error is None):
            raise ValueError(f"step {self.n}: abs_error must be present exactly when oracle_value is")


@dataclass
class DriftReport:
    """Finite-precision orbit against its exact oracle"""
    method: str
    digits: int
    oracle_digits: int
    tol: float
    steps: List[DriftStep] = field(default_factory=list)
    first_tol_breach: Optional[int] = None
    first_period_failure: Optional[int] = None
    pole_step: Optional[int] = None
    near_pole_steps: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def max_error(self):
        errors = [s.abs_error for s in self.steps if s.abs_error is not None]
        return max(errors) if errors else None

    def to_frame(self) -> pd.DataFrame:
        """Tabular view with float64 columns, for summaries only (loses precision)"""
        return pd.DataFrame(
            {
                "n": [s.n for s in self.steps],
                "float_value": [float(s.float_value) for s in self.steps],
                "oracle_value": [float(s.oracle_value) if s.oracle_value is not None else None for s in self.steps],
                "abs_error": [float(s.abs_error) if s.abs_error is not None else None for s in self.steps],
            },
            columns=["n", "float_value", "oracle_value", "abs_error"],
        )

    def __str__(self) -> str:
        return (
            f"Drift Report: "
            f"method={self.method}, "
            f"digits={self.digits}, "
            f"steps={len(self.steps)}, "
            f"first_tol_breach={self.first_tol_breach}, "
            f"first_period_failure={self.first_period_failure}"
        )


@dataclass(frozen=True)
class FixedPointInfo:
    """Fixed point of an iteration map with its multiplier"""
    location: Any
    multiplier: Any
    classification: Stability

    def __str__(self) -> str:
        return f"x = {self.location}  G'(x) = {self.multiplier}  ({self.classification.value})"


@dataclass
class SweepStats:
    """Statistics for a verification sweep over many angles"""
    total: int = 0
    verified: int = 0
    skipped_blowups: int = 0
    max_error: Any = 0
    worst_angle: Optional[str] = None
    duration_seconds: float = 0.0

    def __str__(self) -> str:
        return (
            f"Sweep Stats: "
            f"Total={self.total}, "
            f"Verified={self.verified}, "
            f"Skipped={self.skipped_blowups}, "
            f"MaxError={self.max_error} at {self.worst_angle}, "
            f"Duration={self.duration_seconds:.2f}s"
        )

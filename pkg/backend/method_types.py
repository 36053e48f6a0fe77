"""
Method and Verdict Types
File: method_types.py

Centralized enums shared by the exact, float and rendering layers.
"""

from enum import Enum


class MethodKind(str, Enum):
    """Iteration families studied on f(x) = x² + 1"""
    HOUSEHOLDER = "householder"
    SECANT = "secant"
    SCHROEDER3 = "schroeder3"


class OrbitKind(str, Enum):
    """Verdicts for a rational-angle orbit"""
    BLOWS_UP = "blows_up"
    EVENTUALLY_PERIODIC = "eventually_periodic"


class Basin(str, Enum):
    """Where a complex seed ends up under a Householder iteration"""
    PLUS_I = "+i"
    MINUS_I = "-i"
    REAL_LINE = "real"


class Stability(str, Enum):
    """Fixed-point classification by |multiplier|"""
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    INDIFFERENT = "indifferent"
    REPELLING = "repelling"

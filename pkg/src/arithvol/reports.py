"""Report records shared by the space-level checks and the experiment lab.

Satisfied flags are always decided by exact (integer or certified)
comparisons where the contract promises exactness; the float fields exist for
serialization and eyeballing only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_float(x: float) -> float:
    """Round-trip floats through 12 significant digits for stable output."""
    return float(f"{float(x):.12g}")


@dataclass(frozen=True)
class CheckEntry:
    """One verified inequality: name, both sides, and the exact verdict."""

    name: str
    star: str           # "ss" or "s"
    lhs: float
    rhs: float
    satisfied: bool
    slack: float

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "star": self.star,
            "lhs": fmt_float(self.lhs),
            "rhs": fmt_float(self.rhs),
            "satisfied": self.satisfied,
            "slack": fmt_float(self.slack),
        }


@dataclass(frozen=True)
class DiscrepancyReport:
    """Both sides of an inequality at level m, the bound, and the slack."""

    m: int
    lhs: float
    rhs: float
    bound: float
    slack: float
    satisfied: bool
    constants_used: dict[str, Any] = field(default_factory=dict)
    details: tuple[CheckEntry, ...] = ()

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "lhs": fmt_float(self.lhs),
            "rhs": fmt_float(self.rhs),
            "bound": fmt_float(self.bound),
            "slack": fmt_float(self.slack),
            "satisfied": self.satisfied,
            "constants_used": {k: (fmt_float(v) if isinstance(v, float) else
                                   frac_str(v) if isinstance(v, Fraction) else v)
                               for k, v in sorted(self.constants_used.items())},
            "details": [d.to_jsonable() for d in self.details],
        }


@dataclass(frozen=True)
class VolumeEstimate:
    """Normalized count sequence with an a + b/m extrapolation."""

    raw: tuple[tuple[int, float], ...]
    extrapolated: float
    fit_residual: float
    d: int  # degree exponent of the normalization (dim X or dim Y)

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "raw": [[m, fmt_float(v)] for m, v in self.raw],
            "extrapolated": fmt_float(self.extrapolated),
            "fit_residual": fmt_float(self.fit_residual),
            "d": self.d,
        }


def fit_inverse_linear(points) -> tuple[float, float, float]:
    """Least-squares fit of v = a + b/m; returns (a, b, rms residual)."""
    pts = [(float(m), float(v)) for m, v in points]
    n = len(pts)
    if n == 0:
        raise ValueError("no points to fit")
    if n == 1:
        return pts[0][1], 0.0, 0.0
    s1 = n
    sx = sum(1.0 / m for m, _ in pts)
    sxx = sum(1.0 / (m * m) for m, _ in pts)
    sy = sum(v for _, v in pts)
    sxy = sum(v / m for m, v in pts)
    det = s1 * sxx - sx * sx
    if det == 0:
        return sy / n, 0.0, 0.0
    a = (sxx * sy - sx * sxy) / det
    b = (s1 * sxy - sx * sy) / det
    res = (sum((a + b / m - v) ** 2 for m, v in pts) / n) ** 0.5
    return a, b, res


def make_estimate(raw, d: int) -> VolumeEstimate:
    a, _, res = fit_inverse_linear(raw)
    return VolumeEstimate(tuple((int(m), fmt_float(v)) for m, v in raw),
                          fmt_float(a), fmt_float(res), d)


@dataclass(frozen=True)
class DerivativeReport:
    """Finite-difference derivative data for the volume along the marked point."""

    r_grid: tuple[Fraction, ...]
    left_slopes: tuple[float, ...]
    right_slopes: tuple[float, ...]
    symmetric_estimate: float
    oracle_value: float          # (dim X + 1) * restricted intersection oracle
    relative_gap: float

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "r_grid": [frac_str(r) for r in self.r_grid],
            "left_slopes": [fmt_float(v) for v in self.left_slopes],
            "right_slopes": [fmt_float(v) for v in self.right_slopes],
            "symmetric_estimate": fmt_float(self.symmetric_estimate),
            "oracle_value": fmt_float(self.oracle_value),
            "relative_gap": fmt_float(self.relative_gap),
        }


@dataclass(frozen=True)
class BodyStats:
    """Per-level distinct valuation counts behind an Okounkov body."""

    per_m_distinct: tuple[tuple[int, int], ...]
    normalized: tuple[tuple[int, float], ...]

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "per_m_distinct": [[m, c] for m, c in self.per_m_distinct],
            "normalized": [[m, fmt_float(v)] for m, v in self.normalized],
        }

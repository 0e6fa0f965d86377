"""Exact thresholds of the form u * exp(rho) with u, rho rational.

Archimedean norm bounds in this package are never plain rationals: the norm of
a section is (base value) * exp(-s) where the scale s is a rational number
plus a logarithm of a positive rational (log 2, log 6, log l twists).  All
strict/non-strict comparisons against such thresholds are decidable exactly:
by Lindemann's theorem exp(rho) is irrational for rational rho != 0, so a
rational number can only *equal* the threshold when rho == 0, which is an
exact rational comparison.  Everything else is settled by interval arithmetic
at escalating precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import exp, log

import mpmath

_MAX_PREC = 1 << 16


def _iv_fraction(q: Fraction):
    return mpmath.iv.mpf(q.numerator) / mpmath.iv.mpf(q.denominator)


def _raw_floor(t) -> int:
    """Exact floor of a raw libmp float tuple (sign, man, exp, bc).

    mpmath's context-level floor re-rounds at the ambient working precision,
    which can misplace the floor of wide values; this never rounds.
    """
    sign, man, exp, bc = t
    if man == 0:
        if exp == 0:
            return 0
        raise ArithmeticError("floor of a non-finite value")
    if exp >= 0:
        value = man << exp
    else:
        value = man >> -exp
        if sign and (man & ((1 << -exp) - 1)):
            value += 1  # negative with a fractional part: floor moves down
    return -value if sign else value


def cmp_frac_exp(q: Fraction, rho: Fraction) -> int:
    """Sign of q - exp(rho), computed exactly.

    Returns -1, 0, or +1.  The result 0 occurs only in the rational case
    rho == 0, q == 1.
    """
    q = Fraction(q)
    rho = Fraction(rho)
    if rho == 0:
        return (q > 1) - (q < 1)
    if q <= 0:
        return -1
    # Compare log(q) with rho; equality is impossible for rho != 0.
    prec = 64
    while prec <= _MAX_PREC:
        old = mpmath.iv.prec
        try:
            mpmath.iv.prec = prec
            diff = mpmath.iv.log(_iv_fraction(q)) - _iv_fraction(rho)
            if diff > 0:
                return 1
            if diff < 0:
                return -1
        finally:
            mpmath.iv.prec = old
        prec *= 2
    raise ArithmeticError(f"could not separate {q} from exp({rho})")


@dataclass(frozen=True)
class ScaleExp:
    """The positive real number mult * exp(rho), exactly represented.

    Used both for archimedean scales (as exp(s) with s = rho + log(mult)) and
    for the constant factors 2^k, 3^k, 6^k, l appearing in the counting
    estimates.
    """

    rho: Fraction = Fraction(0)
    mult: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        object.__setattr__(self, "mult", Fraction(self.mult))
        if self.mult <= 0:
            raise ValueError("multiplier must be positive")

    # -- algebra ----------------------------------------------------------

    def shifted(self, rho: Fraction) -> "ScaleExp":
        """Multiply by exp(rho)."""
        return ScaleExp(self.rho + Fraction(rho), self.mult)

    def scaled(self, k: Fraction) -> "ScaleExp":
        """Multiply by the positive rational k."""
        return ScaleExp(self.rho, self.mult * Fraction(k))

    def __mul__(self, other: "ScaleExp") -> "ScaleExp":
        return ScaleExp(self.rho + other.rho, self.mult * other.mult)

    def power(self, n: int) -> "ScaleExp":
        return ScaleExp(self.rho * n, self.mult**n)

    # -- comparisons -------------------------------------------------------

    def cmp_fraction(self, q: Fraction) -> int:
        """Sign of (self - q), exact."""
        q = Fraction(q)
        if q <= 0:
            return 1
        return -cmp_frac_exp(q / self.mult, self.rho)

    def __float__(self) -> float:
        return float(self.mult) * exp(float(self.rho))

    def log_float(self) -> float:
        return float(self.rho) + log(float(self.mult))

    @property
    def is_rational(self) -> bool:
        return self.rho == 0

    def floor(self) -> int:
        """Largest integer <= self.  Certified."""
        if self.rho == 0:
            return self.mult.numerator // self.mult.denominator
        prec = 64
        while prec <= _MAX_PREC:
            old = mpmath.iv.prec
            try:
                mpmath.iv.prec = prec
                val = _iv_fraction(self.mult) * mpmath.iv.exp(_iv_fraction(self.rho))
                lo_t, hi_t = val._mpi_
                lo = _raw_floor(lo_t)
                hi = _raw_floor(hi_t)
                if lo == hi:
                    return lo
            finally:
                mpmath.iv.prec = old
            prec *= 2
        raise ArithmeticError(f"could not certify floor of {self}")

    def strict_int_bound(self) -> int:
        """Largest integer strictly below self."""
        if self.rho == 0 and self.mult.denominator == 1:
            return self.mult.numerator - 1
        return self.floor()

    def int_bound(self, strict: bool) -> int:
        return self.strict_int_bound() if strict else self.floor()


def log_of_int(n: int) -> float:
    """float(log n) for arbitrarily large positive integers."""
    if n <= 0:
        raise ValueError("positive integer required")
    if n.bit_length() <= 900:
        return log(n)
    shift = n.bit_length() - 900
    return log(n >> shift) + shift * log(2.0)


def cmp_log_ratio_with_scale(num: int, den: int, bound: ScaleExp) -> int:
    """Sign of log(num/den) - log(bound), exact.

    Decides inequalities of the form ``log N2 - log N1 <= rk*lam + log(c)``
    that the counting estimates produce, without any floating tolerance.
    """
    if num <= 0 or den <= 0:
        raise ValueError("positive counts required")
    return -bound.cmp_fraction(Fraction(num, den))

"""Flags on the standard integral model of the projective line and their valuations.

A flag is determined by a rational center (the horizontal curve through it)
and a prime p (the vertical step).  The attached valuation of a nonzero
polynomial is (order of vanishing at the center, p-adic valuation of the
leading Taylor coefficient); the restricted variant lives on the horizontal
curve alone and takes p-adic valuations of fiber values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .polynomials import order_at, padic_valuation, poly_degree

FULL = "full"
RESTRICTED = "restricted"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FlagSpec:
    """Center (rational point), prime, and flag length variant."""

    center: Fraction
    prime: int
    variant: str = FULL

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        if self.variant not in (FULL, RESTRICTED):
            raise ValueError("variant must be 'full' or 'restricted'")
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")


@dataclass(frozen=True)
class ValuationVector:
    components: tuple[int, ...]

    def __add__(self, other: "ValuationVector") -> "ValuationVector":
        return ValuationVector(tuple(a + b for a, b in
                                     zip(self.components, other.components)))


@dataclass(frozen=True)
class GoodFlagReport:
    """Conditions for a good flag over p on the horizontal curve.

    (a) the local ring at p is a discrete valuation ring; (b) the residue
    field is the prime field; (c) the vertical step is the fiber over p;
    (d) the closed point is regular and rational over the prime field, which
    for a rational center needs p away from the denominator.
    """

    dvr_local_ring: bool
    prime_residue_field: bool
    vertical_step_is_fiber: bool
    closed_point_rational: bool

    @property
    def ok(self) -> bool:
        return (self.dvr_local_ring and self.prime_residue_field
                and self.vertical_step_is_fiber and self.closed_point_rational)


def validate_good_flag(flag: FlagSpec) -> GoodFlagReport:
    """Check the good-flag conditions for the flag's horizontal curve.

    The curve through a rational point is a copy of the integers, so the ring
    conditions hold for every prime; rationality of the closed point reduces
    to the center being p-integral.
    """
    p_ok = is_prime(flag.prime)
    denominator_ok = flag.center.denominator % flag.prime != 0
    return GoodFlagReport(
        dvr_local_ring=p_ok,
        prime_residue_field=p_ok,
        vertical_step_is_fiber=True,
        closed_point_rational=p_ok and denominator_ok,
    )


def require_good_flag(flag: FlagSpec) -> None:
    report = validate_good_flag(flag)
    if not report.ok:
        raise ValueError(f"flag {flag} is not a good flag: {report}")


def valuation(flag: FlagSpec, coeffs: Sequence, level: int = 0) -> ValuationVector:
    """Valuation vector of a nonzero polynomial along the flag.

    Full variant: (vanishing order w1 at the center, p-adic valuation of the
    value of phi/(t-center)^w1 at the center).  The local equations are the
    canonical ones; the result does not depend on that choice.
    """
    if flag.variant != FULL:
        raise ValueError("polynomial valuations need the full-flag variant")
    cs = [Fraction(c) for c in coeffs]
    if poly_degree(cs) < 0:
        raise ValueError("valuation of the zero polynomial")
    require_good_flag(flag)
    w1, lead = order_at(cs, flag.center)
    w2 = padic_valuation(lead, flag.prime)
    return ValuationVector((w1, w2))


def valuation_of_value(flag: FlagSpec, value: Fraction) -> ValuationVector:
    """Restricted-variant valuation of a nonzero fiber value."""
    value = Fraction(value)
    if value == 0:
        raise ValueError("valuation of zero")
    require_good_flag(flag)
    return ValuationVector((padic_valuation(value, flag.prime),))


def cloud_csv_rows(level: int, cloud) -> list[list]:
    """CSV rows (m, w1, w2, multiplicity) for a valuation cloud multiset.

    Restricted-variant vectors have no first component; the column is left
    empty for them.
    """
    rows = []
    for vec, mult in sorted(cloud.items(), key=lambda kv: kv[0].components):
        comps = vec.components
        if len(comps) == 2:
            rows.append([level, comps[0], comps[1], mult])
        else:
            rows.append([level, "", comps[0], mult])
    return rows


def valuation_cloud(sections: Iterable, flag: FlagSpec, level: int = 0):
    """(multiset of valuation vectors of the nonzero sections, distinct count).

    Sections are coefficient vectors for the full variant and fiber values
    for the restricted variant; zero entries are skipped automatically.
    """
    cloud: Counter[ValuationVector] = Counter()
    for sec in sections:
        if flag.variant == FULL:
            if not any(sec):
                continue
            cloud[valuation(flag, sec, level)] += 1
        else:
            val = sec[0] if isinstance(sec, (tuple, list)) else sec
            if val == 0:
                continue
            cloud[valuation_of_value(flag, val)] += 1
    return cloud, len(cloud)

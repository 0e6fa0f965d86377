"""Toy pairs on the projective line over Q and their section lattices.

A pair is (degree-a multiple of the divisor at infinity with an archimedean
scale; a nonnegative vanishing divisor supported at rational points), plus a
marked rational point.  At level m the sections are the integer polynomials
of degree <= m*a with prescribed vanishing orders; the archimedean norm is
the scaled coefficient-max (Gauss) norm or the certified circle-sup norm.

Scale convention: the pair's ``arch_scale`` rides on each copy of the degree,
so the level-m threshold is exp(m * degree * arch_scale) (times the optional
rational multiplier to the same power).  This is the convention under which
integer rescaling of a pair is literally a relabeling of levels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from . import lattices as lat
from .polynomials import poly_mul
from .reports import frac_str
from .scaling import ScaleExp
from .spaces import (COEFF_MAX, CIRCLE_SUP, AdelicSpace, ArchNorm, LinearMap,
                     circle_sup_enclosure, image_lattice_rows)

DEGREE_CAP = 2000


@dataclass(frozen=True)
class PairSpec:
    """Degree, archimedean scale, vanishing divisor, marked point, slope budget."""

    degree: int
    arch_scale: Fraction
    norm_mode: str = COEFF_MAX
    vanishing: tuple[tuple[Fraction, Fraction], ...] = ()
    marked_point: Fraction = Fraction(0)
    slope_budget: Fraction | None = None
    arch_mult: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "arch_scale", Fraction(self.arch_scale))
        object.__setattr__(self, "arch_mult", Fraction(self.arch_mult))
        object.__setattr__(self, "marked_point", Fraction(self.marked_point))
        van = tuple((Fraction(a), Fraction(e)) for a, e in self.vanishing)
        object.__setattr__(self, "vanishing", van)
        if self.degree < 1:
            raise ValueError("degree must be a positive integer")
        if self.arch_scale < 0 or self.arch_mult < 1:
            raise ValueError("archimedean scale must be nonnegative")
        if self.norm_mode not in (COEFF_MAX, CIRCLE_SUP):
            raise ValueError(f"unknown norm mode {self.norm_mode!r}")
        pts = [a for a, _ in van]
        if len(set(pts)) != len(pts):
            raise ValueError("vanishing points must be pairwise distinct")
        if any(e < 0 for _, e in van):
            raise ValueError("vanishing multiplicities must be >= 0")
        total = sum((e for _, e in van), Fraction(0))
        if total > self.degree:
            raise ValueError("total vanishing multiplicity exceeds the degree")
        budget = self.slope_budget
        if budget is None:
            budget = min(Fraction(1), self.degree - total)
        budget = Fraction(budget)
        if budget < 0 or budget > self.degree - total:
            raise ValueError("slope budget must satisfy 0 <= rho0 <= degree - total vanishing")
        object.__setattr__(self, "slope_budget", budget)

    @property
    def total_vanishing(self) -> Fraction:
        return sum((e for _, e in self.vanishing), Fraction(0))

    @property
    def marked_multiplicity(self) -> Fraction:
        for a, e in self.vanishing:
            if a == self.marked_point:
                return e
        return Fraction(0)

    def scale_exp(self) -> ScaleExp:
        """Total archimedean scale of the pair (level 1): degree copies."""
        return ScaleExp(self.degree * self.arch_scale,
                        self.arch_mult**self.degree)

    def level_scale(self, m: int) -> ScaleExp:
        return ScaleExp(m * self.degree * self.arch_scale,
                        self.arch_mult**(m * self.degree))

    def scaled(self, a: int) -> "PairSpec":
        """The pair multiplied by the positive integer a."""
        return PairSpec(self.degree * a, self.arch_scale, self.norm_mode,
                        tuple((p, e * a) for p, e in self.vanishing),
                        self.marked_point, self.slope_budget * a,
                        self.arch_mult)

    # -- JSON ---------------------------------------------------------------

    def to_json(self) -> str:
        data = {
            "degree": self.degree,
            "lambda": frac_str(self.arch_scale),
            "mode": self.norm_mode,
            "E": [{"alpha": frac_str(a), "mult": frac_str(e)}
                  for a, e in self.vanishing],
            "Y": frac_str(self.marked_point),
            "rho0": frac_str(self.slope_budget),
        }
        if self.arch_mult != 1:
            data["mult"] = frac_str(self.arch_mult)
        return json.dumps(data, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "PairSpec":
        data = json.loads(text)
        return PairSpec(
            degree=int(data["degree"]),
            arch_scale=Fraction(data["lambda"]),
            norm_mode=data.get("mode", COEFF_MAX),
            vanishing=tuple((Fraction(item["alpha"]), Fraction(item["mult"]))
                            for item in data.get("E", [])),
            marked_point=Fraction(data.get("Y", 0)),
            slope_budget=Fraction(data["rho0"]) if "rho0" in data else None,
            arch_mult=Fraction(data.get("mult", 1)),
        )


def pair_sum(s1: PairSpec, s2: PairSpec) -> PairSpec:
    """The sum of two pairs (degrees, scales, and vanishing divisors add)."""
    if s1.norm_mode != s2.norm_mode or s1.marked_point != s2.marked_point:
        raise ValueError("pairs must share mode and marked point")
    if s1.arch_mult != 1 or s2.arch_mult != 1:
        raise ValueError("pair sums support rational scales only")
    merged: dict[Fraction, Fraction] = {}
    for a, e in s1.vanishing + s2.vanishing:
        merged[a] = merged.get(a, Fraction(0)) + e
    deg = s1.degree + s2.degree
    scale = (s1.degree * s1.arch_scale + s2.degree * s2.arch_scale) / deg
    return PairSpec(deg, scale, s1.norm_mode,
                    tuple(sorted(merged.items())), s1.marked_point,
                    min(s1.slope_budget + s2.slope_budget,
                        deg - sum(merged.values(), Fraction(0))))


@dataclass(frozen=True)
class SectionBasisReport:
    m: int
    basis: tuple[tuple[int, ...], ...]  # columns, Hermite form
    rank: int


def vanishing_orders(spec: PairSpec, m: int,
                     extra_order: Fraction = Fraction(0)) -> dict[Fraction, int]:
    """Integer order per point at level m: ceil realizes 'order >= m*e'."""
    extra_order = Fraction(extra_order)
    orders: dict[Fraction, int] = {}
    for alpha, e in spec.vanishing:
        orders[alpha] = max(0, ceil(m * e))
    y = spec.marked_point
    target = m * (spec.marked_multiplicity + extra_order)
    orders[y] = max(0, ceil(target))
    return {a: k for a, k in orders.items() if k > 0}


def _vanishing_basis_cols(degree_total: int, orders: dict[Fraction, int]):
    """Columns spanning the integer polynomials of degree <= degree_total with
    the given vanishing orders.  Products of primitive linear factors generate
    the full lattice (Gauss's lemma), so no extra saturation is needed."""
    core = [1]
    total = 0
    for alpha, k in sorted(orders.items()):
        u, v = alpha.numerator, alpha.denominator
        for _ in range(k):
            core = poly_mul(core, [-u, v])
        total += k
    if total > degree_total:
        return (), 0
    n = degree_total + 1
    cols = []
    for j in range(degree_total - total + 1):
        col = [0] * n
        for i, c in enumerate(core):
            col[i + j] = c
        cols.append(tuple(col))
    rank = len(cols)
    matrix = tuple(tuple(col[i] for col in cols) for i in range(n))
    return matrix, rank


def build_section_space(spec: PairSpec, m: int,
                        extra_order: Fraction = Fraction(0),
                        degree_cap: int = DEGREE_CAP):
    """(AdelicSpace, SectionBasisReport) for level m with an extra marked-point order.

    An over-constrained level yields the rank-0 space, not an error.
    """
    if m < 1:
        raise ValueError("level must be >= 1")
    if m * spec.degree > degree_cap:
        raise ValueError(f"level degree {m * spec.degree} exceeds cap {degree_cap}")
    orders = vanishing_orders(spec, m, extra_order)
    matrix, rank = _vanishing_basis_cols(m * spec.degree, orders)
    norm = ArchNorm(spec.norm_mode, spec.level_scale(m))
    space = AdelicSpace(m * spec.degree + 1, matrix, norm,
                        label=f"sections(m={m})")
    expected = max(0, m * spec.degree - sum(orders.values()) + 1)
    assert space.rank == rank == expected
    return space, SectionBasisReport(m, matrix, rank)


def twisted_section_space(spec: PairSpec, m: int, *,
                          extra_order: Fraction = Fraction(0),
                          order_bumps: dict[Fraction, int] | None = None,
                          extra_degree: int = 0,
                          scale_mult: Fraction = Fraction(1),
                          scale_shift: Fraction = Fraction(0),
                          degree_cap: int = DEGREE_CAP) -> AdelicSpace:
    """Level-m space twisted by auxiliary degree, orders, and scale factors.

    Used for the combined divisors appearing in the sandwich estimates (log-2
    rescale plus multiples of an auxiliary divisor).
    """
    total_degree = m * spec.degree + extra_degree
    if total_degree > degree_cap:
        raise ValueError("degree cap exceeded")
    orders = vanishing_orders(spec, m, extra_order)
    for alpha, bump in (order_bumps or {}).items():
        alpha = Fraction(alpha)
        orders[alpha] = max(0, orders.get(alpha, 0) + bump)
    orders = {a: k for a, k in orders.items() if k > 0}
    matrix, _ = _vanishing_basis_cols(total_degree, orders)
    scale = spec.level_scale(m).scaled(scale_mult).shifted(scale_shift)
    return AdelicSpace(total_degree + 1, matrix,
                       ArchNorm(spec.norm_mode, scale),
                       label=f"sections(m={m})+twist")


# ---------------------------------------------------------------------------
# Restriction to the marked point
# ---------------------------------------------------------------------------


def taylor_functional(alpha: Fraction, order: int, ncols: int):
    """Row mapping a coefficient vector to the order-th Taylor coefficient at alpha."""
    from math import comb

    alpha = Fraction(alpha)
    return tuple(
        Fraction(comb(j, order)) * alpha**(j - order) if j >= order else Fraction(0)
        for j in range(ncols))


def restriction_to_Y(spec: PairSpec, m: int, order: int) -> LinearMap:
    """phi -> coefficient of (t - Y)^order in the expansion of phi at the marked point."""
    if order < 0:
        raise ValueError("order must be >= 0")
    ncols = m * spec.degree + 1
    return LinearMap((taylor_functional(spec.marked_point, order, ncols),))


def image_generator(space: AdelicSpace, linmap: LinearMap) -> Fraction:
    """Positive generator of the rank-1 image lattice (0 for the zero image)."""
    if linmap.n_out != 1:
        raise ValueError("generator is defined for rank-1 codomains")
    if space.rank == 0:
        return Fraction(0)
    den, rows = image_lattice_rows(space, linmap)
    if not rows:
        return Fraction(0)
    return Fraction(abs(rows[0][0]), den)


# ---------------------------------------------------------------------------
# Heights and norm evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightValue:
    """degree * (arch scale + log max(|u|, |v|)), kept in exact parts."""

    scale_part: Fraction       # degree * arch_scale
    mult_part: Fraction        # arch_mult**degree * max(|u|,|v|)**degree
    degree: int

    def exp_form(self) -> ScaleExp:
        return ScaleExp(self.scale_part, self.mult_part)

    def value(self) -> float:
        return self.exp_form().log_float()


def height(spec: PairSpec, beta: Fraction | None) -> HeightValue:
    """Height of a rational point (None encodes the point at infinity)."""
    if beta is None:
        u, v = 1, 0
    else:
        beta = Fraction(beta)
        u, v = beta.numerator, beta.denominator
    big = max(abs(u), abs(v))
    return HeightValue(spec.degree * spec.arch_scale,
                       (spec.arch_mult * big)**spec.degree,
                       spec.degree)


@dataclass(frozen=True)
class NormEvaluation:
    """Certified enclosure base in [lo, hi], full value = base / threshold."""

    base_lo: Fraction
    base_hi: Fraction
    threshold: ScaleExp

    @property
    def exact(self) -> bool:
        return self.base_lo == self.base_hi

    def value_lo(self) -> float:
        return float(self.base_lo) / float(self.threshold)

    def value_hi(self) -> float:
        return float(self.base_hi) / float(self.threshold)


def arch_norm_eval(coeffs: Sequence[int], mode: str, m: int,
                   lam: Fraction) -> NormEvaluation:
    """Norm of an integer coefficient vector at level m under scale lam.

    coeff-max is exact; circle-sup returns a certified enclosure via grid
    evaluation with the Bernstein derivative correction.
    """
    thr = ScaleExp(m * Fraction(lam))
    if mode == COEFF_MAX:
        base = Fraction(max((abs(int(c)) for c in coeffs), default=0))
        return NormEvaluation(base, base, thr)
    if mode == CIRCLE_SUP:
        lo, hi = circle_sup_enclosure([int(c) for c in coeffs])
        return NormEvaluation(lo, hi, thr)
    raise ValueError(f"unknown norm mode {mode!r}")

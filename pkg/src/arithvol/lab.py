"""Level-indexed experiments: constants, count-vs-valuation discrepancies,
Okounkov bodies, truncated volumes, sandwich estimates, and the derivative
experiment for the volume of a pair along its marked point.

The ambient geometry is fixed: the variety is the projective line (dimension
one), the marked point is zero-dimensional, so full-flag data is planar and
restricted data is one-dimensional.

Counting strategy: spaces whose vanishing constraints sit at the origin have
coordinate-aligned lattices, and counts, restricted images, and valuation
clouds all have closed forms (the box decouples per coordinate).  Everything
else is enumerated under the configured cap.  The enumeration route is kept
alive as the oracle for the closed forms in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log
from typing import Sequence

import mpmath

from . import spaces as sp
from .flags import (FULL, RESTRICTED, FlagSpec, require_good_flag,
                    valuation_cloud, validate_good_flag)
from .geometry import RationalPolytope, convex_hull, minkowski_sum, polytope_volume
from .lattices import EnumerationBudgetExceeded
from .models import (PairSpec, build_section_space, pair_sum,
                     taylor_functional, twisted_section_space,
                     vanishing_orders)
from .polynomials import floor_log, padic_valuation
from .reports import (BodyStats, CheckEntry, DerivativeReport,
                      DiscrepancyReport, VolumeEstimate, fit_inverse_linear,
                      make_estimate)
from .scaling import ScaleExp, log_of_int
from .spaces import COEFF_MAX, DEFAULT_CAP, AdelicSpace, LinearMap

DIM_X = 1
DIM_Y = 0


# ---------------------------------------------------------------------------
# Symmetric one-dimensional value sets (restricted images and friends)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricSet:
    """Finite symmetric set of rationals.

    Either the progression {k*gen : |k| <= kmax} (kept symbolic, the counts
    are astronomically large at high level) or an explicit sorted tuple.
    """

    gen: Fraction = Fraction(0)
    kmax: int = 0
    values: tuple[Fraction, ...] | None = None

    @staticmethod
    def progression(gen: Fraction, kmax: int) -> "SymmetricSet":
        gen = abs(Fraction(gen))
        if gen == 0 or kmax <= 0:
            return SymmetricSet(Fraction(0), 0, None)
        return SymmetricSet(gen, int(kmax), None)

    @staticmethod
    def explicit(vals) -> "SymmetricSet":
        return SymmetricSet(values=tuple(sorted(Fraction(v) for v in set(vals) | {0})))

    @property
    def is_progression(self) -> bool:
        return self.values is None

    def count(self) -> int:
        if self.is_progression:
            return 2 * self.kmax + 1
        return len(self.values)

    def max_abs(self) -> Fraction:
        if self.is_progression:
            return self.gen * self.kmax
        return max(abs(v) for v in self.values)

    def contains(self, v: Fraction) -> bool:
        v = Fraction(v)
        if self.is_progression:
            if v == 0:
                return True
            if self.gen == 0:
                return False
            q = v / self.gen
            return q.denominator == 1 and abs(q) <= self.kmax
        return v in self.values

    def materialize(self, cap: int = 200_000) -> tuple[Fraction, ...]:
        if not self.is_progression:
            return self.values
        if self.count() > cap:
            raise EnumerationBudgetExceeded(
                f"refusing to materialize {self.count()} progression points")
        return tuple(k * self.gen for k in range(-self.kmax, self.kmax + 1))

    def subset_of(self, other: "SymmetricSet", cap: int = 200_000) -> bool:
        if self.is_progression and other.is_progression:
            if self.kmax == 0 or self.gen == 0:
                return True
            if other.gen == 0:
                return False
            q = self.gen / other.gen
            return (q.denominator == 1
                    and self.gen * self.kmax <= other.gen * other.kmax)
        return all(other.contains(v) for v in self.materialize(cap))

    def cl_closure(self) -> "SymmetricSet":
        """Integer span meet convex hull; progressions are already closed."""
        if self.is_progression:
            return self
        pts = sp.cl_hull([(v,) for v in self.values])
        return SymmetricSet.explicit([p[0] for p in pts])

    def distinct_valuations(self, p: int) -> tuple[int, ...]:
        """Sorted distinct p-adic valuations over the nonzero elements."""
        if self.is_progression:
            if self.kmax == 0:
                return ()
            base = padic_valuation(self.gen, p)
            return tuple(base + u for u in range(floor_log(p, self.kmax) + 1))
        return tuple(sorted({padic_valuation(v, p) for v in self.values if v != 0}))

    def log_count(self) -> float:
        return log_of_int(self.count())


# ---------------------------------------------------------------------------
# Counting front ends (closed form where the lattice is coordinate-aligned)
# ---------------------------------------------------------------------------


def level_count(spec: PairSpec, m: int, extra_order: Fraction = Fraction(0),
                star: str = "ss", cap: int = DEFAULT_CAP) -> int:
    """#sections at level m with an extra marked-point order; exact integer."""
    space, _ = build_section_space(spec, m, extra_order)
    return sp.count_small_sections(space, star, cap).value()


def level_count_interval(spec: PairSpec, m: int,
                         extra_order: Fraction = Fraction(0),
                         star: str = "ss", cap: int = DEFAULT_CAP) -> sp.CountInterval:
    space, _ = build_section_space(spec, m, extra_order)
    return sp.count_small_sections(space, star, cap)


def _marked_order(spec: PairSpec, m: int, twist_n: int = 0,
                  extra_order: Fraction = Fraction(0)) -> int:
    return max(0, ceil(m * (spec.marked_multiplicity + Fraction(extra_order))) + twist_n)


def restricted_section_set(spec: PairSpec, m: int, *, twist_n: int = 0,
                           variant: str = "image", star: str = "ss",
                           scale_mult: Fraction = Fraction(1),
                           extra_degree: int = 0,
                           cap: int = DEFAULT_CAP) -> SymmetricSet:
    """Fiber values at the marked point of the chosen section set.

    variant: "image" (plain restricted image), "CL" (its convex-lattice
    closure), "quot" (quotient-norm sections; strictly-small kind only).
    On coordinate-aligned spaces with the marked point at the origin all
    three coincide: the fiber map is a coordinate projection, so the
    quotient norm of a value is attained at the coordinate vector itself
    and the image is already an arithmetic progression.
    """
    if spec.norm_mode != COEFF_MAX:
        raise ValueError("restricted sets require the exact coeff-max mode")
    if variant == "quot" and star != "ss":
        raise ValueError("quotient-norm sections are defined for the strict kind")
    order = _marked_order(spec, m, twist_n)
    space = twisted_section_space(
        spec, m, order_bumps={spec.marked_point: twist_n},
        extra_degree=extra_degree, scale_mult=scale_mult)
    diag = space.diagonal_structure()
    if diag is not None and spec.marked_point == 0:
        bound = sp._coeff_bound(space, star)
        d = diag.get(order)
        if d is None or bound < d:
            return SymmetricSet.progression(Fraction(0), 0)
        return SymmetricSet.progression(Fraction(d), bound // d)
    linmap = LinearMap((taylor_functional(spec.marked_point, order,
                                          space.ambient_dim),))
    if variant == "quot":
        if space.rank == 0:
            return SymmetricSet.progression(Fraction(0), 0)
        try:
            pts, _ = sp.quotient_norm_sections(space, linmap, cap)
        except ValueError:
            return SymmetricSet.progression(Fraction(0), 0)  # zero image
        return SymmetricSet.explicit([p[0] for p in pts])
    img = sp.image_of_sections(space, linmap, star, cap)
    out = SymmetricSet.explicit([p[0] for p in img])
    return out.cl_closure() if variant == "CL" else out


def full_cloud(spec: PairSpec, m: int, flag: FlagSpec,
               extra_order: Fraction = Fraction(0),
               cap: int = DEFAULT_CAP):
    """(distinct count, distinct (w1, w2) pairs) over nonzero strict sections."""
    require_good_flag(flag)
    space, _ = build_section_space(spec, m, extra_order)
    diag = space.diagonal_structure()
    if diag is not None and flag.center == 0:
        bound = sp._coeff_bound(space, "ss")
        pairs = []
        for j, d in sorted(diag.items()):
            if bound < d:
                continue
            top = floor_log(flag.prime, bound // d)
            base = padic_valuation(Fraction(d), flag.prime)
            pairs.extend((j, base + u) for u in range(top + 1))
        return len(pairs), pairs
    vecs = sp.section_vectors(space, "ss", cap)
    cloud, distinct = valuation_cloud(
        [v for v in vecs if any(v)], FlagSpec(flag.center, flag.prime, FULL))
    pairs = sorted({tuple(k.components) for k in cloud})
    return distinct, pairs


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsRecord:
    """Constants feeding the finite-level discrepancy bounds.

    The nef-slope values are certified upper bounds over a finite test
    family; every downstream inequality uses them monotonically, so the
    checks get weaker, never wrong.
    """

    rank_growth: Fraction          # sup_m rk/m^dim for the pair divisor
    rank_growth_witness: int
    nef_slope_upper: float         # upper bound for the pair divisor's slope
    point_rank_growth: int         # rank growth over the marked point (=1)
    majorizer_scale: float         # scale of the restricted majorizer model
    level_gap_rate: float          # per-level discrepancy rate
    asymptotic_gap_rate: float     # its m -> infinity limit
    twisted_gap_rate: float        # epsilon-twisted rate for the estimates
    prime_floor_note: float        # reported prime threshold, never enforced
    prime: int
    epsilon: float
    margin: Fraction

    def to_jsonable(self):
        from .reports import fmt_float, frac_str
        return {
            "rank_growth": frac_str(self.rank_growth),
            "rank_growth_witness": self.rank_growth_witness,
            "nef_slope_upper": fmt_float(self.nef_slope_upper),
            "point_rank_growth": self.point_rank_growth,
            "majorizer_scale": fmt_float(self.majorizer_scale),
            "level_gap_rate": fmt_float(self.level_gap_rate),
            "asymptotic_gap_rate": fmt_float(self.asymptotic_gap_rate),
            "twisted_gap_rate": fmt_float(self.twisted_gap_rate),
            "prime_floor_note": fmt_float(self.prime_floor_note),
            "prime": self.prime,
            "epsilon": fmt_float(self.epsilon),
            "margin": frac_str(self.margin),
        }


def rank_growth(spec: PairSpec, m_probe: int = 12) -> tuple[Fraction, int]:
    """sup over levels of rank/m^(dim X), with the witness level."""
    best, witness = Fraction(0), 1
    for m in range(1, m_probe + 1):
        val = Fraction(m * spec.degree + 1, m)
        if val > best:
            best, witness = val, m
    return best, witness


def level_gap_rate(growth: float, slope: float, p: int, m: int,
                   dim: int) -> float:
    """Per-level discrepancy rate: growth * (log4 * slope + decaying term)."""
    return growth * (log(4.0) * slope
                     + log(4.0 * p) * log(4.0 * p * growth * m**dim) / m)


def asymptotic_gap_rate(growth: float, slope: float) -> float:
    """Limit of the per-level rate: growth * slope * log 4."""
    return growth * slope * log(4.0)


def twisted_gap_rate(m_growth: float, m_slope: float, n_growth: float,
                     p: int, eps: float) -> float:
    """Epsilon-twisted rate for the central-quantity estimates."""
    return m_growth * (log(4.0) * m_slope + eps) / log(p) + eps * n_growth


def nef_slope_upper(spec: PairSpec,
                    mu_grid: Sequence[Fraction] = tuple(Fraction(i, 8)
                                                        for i in range(17))) -> float:
    """Certified upper bound: min over the nef test family of pairing/volume.

    Family members are scale-mu twists of the hyperplane divisor (nef for
    mu >= 0, geometric volume one); the pairing value is the pair's total
    scale plus degree * mu.
    """
    if not mu_grid:
        raise ValueError("empty nef test family")
    total = spec.scale_exp().log_float()
    return min(total + spec.degree * float(mu) for mu in mu_grid)


def majorizer_scale(spec: PairSpec, margin: Fraction = Fraction(1)) -> float:
    """Scale of the restricted majorizing model at the marked point.

    Any model whose scale exceeds the pair's total scale majorizes every
    restricted value (the fiber map has operator norm at most one on the
    coefficient box at the origin); the margin keeps it safely above.
    """
    return spec.scale_exp().log_float() + float(margin)


def evaluate_constants(spec: PairSpec, m: int, p: int, eps: float,
                       margin: Fraction = Fraction(1)) -> ConstantsRecord:
    if m < 1:
        raise ValueError("level must be >= 1")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    growth, witness = rank_growth(spec)
    mu = majorizer_scale(spec, margin)
    iy = 1  # rank growth over a point: rk = 1 for every level
    c_level = level_gap_rate(iy, mu, p, m, DIM_Y)
    c_asym = asymptotic_gap_rate(iy, mu)
    c_twist = twisted_gap_rate(iy, mu, iy, p, eps)
    return ConstantsRecord(
        rank_growth=growth, rank_growth_witness=witness,
        nef_slope_upper=nef_slope_upper(spec), point_rank_growth=iy,
        majorizer_scale=mu, level_gap_rate=c_level,
        asymptotic_gap_rate=c_asym, twisted_gap_rate=c_twist,
        prime_floor_note=max(3.0, 4.0 ** (mu / eps)), prime=p,
        epsilon=float(eps), margin=Fraction(margin))


# ---------------------------------------------------------------------------
# Count-vs-valuation discrepancy at a level
# ---------------------------------------------------------------------------


def count_valuation_discrepancy(spec: PairSpec, flag: FlagSpec, variant: str,
                                m: int, cap: int = DEFAULT_CAP,
                                margin: Fraction = Fraction(1)) -> DiscrepancyReport:
    """|log #restricted sections - (#distinct valuations) log p| <= rate * m.

    ``variant`` picks the convex-lattice closure or the quotient-norm route.
    The rate uses the certified-upper majorizer scale, so the bound is weaker
    than the theoretical one and the check stays honest.
    """
    if variant not in ("CL", "quot"):
        raise ValueError("variant must be 'CL' or 'quot'")
    require_good_flag(flag)
    if spec.norm_mode != COEFF_MAX:
        raise ValueError("discrepancy checks require the coeff-max mode")
    values = restricted_section_set(spec, m, variant=variant, cap=cap)
    consts = evaluate_constants(spec, m, flag.prime, eps=1.0, margin=margin)
    with mpmath.workdps(50):
        lhs = mpmath.log(values.count())
        logp = mpmath.log(flag.prime)
        rhs = len(values.distinct_valuations(flag.prime)) * logp
        bound = mpmath.mpf(consts.level_gap_rate) / logp * (m ** (DIM_Y + 1))
        slack = bound - abs(lhs - rhs)
        ok = bool(slack >= 0)
    return DiscrepancyReport(
        m=m, lhs=float(lhs), rhs=float(rhs), bound=float(bound),
        slack=float(slack), satisfied=ok,
        constants_used=dict(consts.to_jsonable(), variant=variant))


# ---------------------------------------------------------------------------
# Okounkov bodies
# ---------------------------------------------------------------------------

YM_FULL = "YM-full"
RESTRICTED_CL = "restricted-CL"
RESTRICTED_QUOT = "restricted-quot"


def build_okounkov_body(spec: PairSpec, flag: FlagSpec, variant: str,
                        m_range: Sequence[int],
                        extra_order: Fraction = Fraction(0),
                        cap: int = DEFAULT_CAP):
    """Hull of the scaled valuation clouds over the level range, plus stats."""
    if not m_range:
        raise ValueError("empty level range")
    require_good_flag(flag)
    points: set[tuple[Fraction, ...]] = set()
    per_m = []
    normalized = []
    if variant == YM_FULL:
        dim = 2
        for m in m_range:
            distinct, pairs = full_cloud(spec, m, flag, extra_order, cap)
            per_m.append((m, distinct))
            normalized.append((m, distinct / m ** (DIM_X + 1)))
            # hull only needs the vertical extremes of each cloud column
            cols: dict[int, list[int]] = {}
            for w1, w2 in pairs:
                cols.setdefault(w1, []).append(w2)
            for w1, ws in cols.items():
                points.add((Fraction(w1, m), Fraction(min(ws), m)))
                points.add((Fraction(w1, m), Fraction(max(ws), m)))
    elif variant in (RESTRICTED_CL, RESTRICTED_QUOT):
        dim = 1
        which = "CL" if variant == RESTRICTED_CL else "quot"
        for m in m_range:
            vals = restricted_section_set(spec, m, twist_n=0, variant=which,
                                          cap=cap)
            dv = vals.distinct_valuations(flag.prime)
            per_m.append((m, len(dv)))
            normalized.append((m, len(dv) / m ** (DIM_Y + 1)))
            points.update((Fraction(v, m),) for v in dv)
    else:
        raise ValueError(f"unknown body variant {variant!r}")
    body = convex_hull(points, dim) if points else RationalPolytope(dim, ())
    stats = BodyStats(tuple(per_m), tuple((m, float(v)) for m, v in normalized))
    return body, stats


# ---------------------------------------------------------------------------
# Truncated volumes
# ---------------------------------------------------------------------------


def truncated_avol(spec: PairSpec, extra_order: Fraction = Fraction(0),
                   m_window: Sequence[int] = range(8, 41),
                   cap: int = DEFAULT_CAP):
    """Normalized strict-section counts with a + b/m extrapolation.

    Exact mode returns one estimate; interval mode returns (lower, upper).
    """
    denom = lambda m: m ** (DIM_X + 1) / 2.0
    if spec.norm_mode == COEFF_MAX:
        raw = [(m, log_of_int(level_count(spec, m, extra_order, "ss", cap)))
               for m in m_window]
        return make_estimate([(m, v / denom(m)) for m, v in raw], DIM_X)
    lo_raw, hi_raw = [], []
    for m in m_window:
        ci = level_count_interval(spec, m, extra_order, "ss", cap)
        lo_raw.append((m, log_of_int(ci.lo) / denom(m)))
        hi_raw.append((m, log_of_int(ci.hi) / denom(m)))
    return make_estimate(lo_raw, DIM_X), make_estimate(hi_raw, DIM_X)


def truncated_restricted_vol(spec: PairSpec, variant: str = "CL",
                             m_window: Sequence[int] = range(8, 41),
                             cap: int = DEFAULT_CAP) -> VolumeEstimate:
    """Normalized restricted (CL or quotient) counts with extrapolation."""
    raw = []
    for m in m_window:
        vals = restricted_section_set(spec, m, variant=variant, cap=cap)
        raw.append((m, vals.log_count() / m ** (DIM_Y + 1)))
    return make_estimate(raw, DIM_Y)


# ---------------------------------------------------------------------------
# Inclusion checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InclusionReport:
    m: int
    n: int
    epsilon: Fraction
    first_holds: bool       # quot(m pair; nY)  c  image(m (pair+eps); nY)
    second_holds: bool      # quot(m (pair-eps); nY)  c  image(m pair; nY)
    counts: dict

    @property
    def ok(self) -> bool:
        return self.first_holds and self.second_holds

    def to_jsonable(self):
        from .reports import frac_str
        return {"m": self.m, "n": self.n, "epsilon": frac_str(self.epsilon),
                "first_holds": self.first_holds,
                "second_holds": self.second_holds,
                "counts": self.counts, "satisfied": self.ok}


def _eps_scaled(spec: PairSpec, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Split a rational per-level twist eps into the spec's per-copy scale."""
    return Fraction(eps) / spec.degree, -Fraction(eps) / spec.degree


def check_inclusions(spec: PairSpec, eps: Fraction, m: int, n: int,
                     cap: int = DEFAULT_CAP) -> InclusionReport:
    """Both quotient-vs-restricted inclusions at one level and twist order."""
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("epsilon must be >= 0")
    if n > spec.slope_budget * m:
        raise ValueError("twist order exceeds the slope budget at this level")
    up, down = _eps_scaled(spec, eps)
    plus = PairSpec(spec.degree, spec.arch_scale + up, spec.norm_mode,
                    spec.vanishing, spec.marked_point, spec.slope_budget,
                    spec.arch_mult)
    quot_base = restricted_section_set(spec, m, twist_n=n, variant="quot", cap=cap)
    img_plus = restricted_section_set(plus, m, twist_n=n, variant="image", cap=cap)
    first = quot_base.subset_of(img_plus, cap)
    img_base = restricted_section_set(spec, m, twist_n=n, variant="image", cap=cap)
    if spec.arch_scale + down >= 0:
        minus = PairSpec(spec.degree, spec.arch_scale + down, spec.norm_mode,
                         spec.vanishing, spec.marked_point, spec.slope_budget,
                         spec.arch_mult)
        quot_minus = restricted_section_set(minus, m, twist_n=n, variant="quot",
                                            cap=cap)
    else:
        quot_minus = SymmetricSet.progression(Fraction(0), 0)
    second = quot_minus.subset_of(img_base, cap)
    return InclusionReport(
        m=m, n=n, epsilon=eps, first_holds=first, second_holds=second,
        counts={"quot": quot_base.count(), "image_plus": img_plus.count(),
                "quot_minus": quot_minus.count(), "image": img_base.count()})


def first_inclusion_level(spec: PairSpec, eps: Fraction, m_max: int,
                          cap: int = DEFAULT_CAP) -> int | None:
    """Smallest level at which both inclusions hold for all admissible twists."""
    for m in range(1, m_max + 1):
        nmax = int(spec.slope_budget * m)
        if all(check_inclusions(spec, eps, m, n, cap).ok
               for n in range(1, nmax + 1)):
            return m
    return None


# ---------------------------------------------------------------------------
# Sandwich bounds for twisting down by the marked point
# ---------------------------------------------------------------------------


def _auxiliary_threshold(spec: PairSpec) -> Fraction:
    """Threshold of the degree-one auxiliary divisor with explicit witnesses.

    The witnesses are the constant 1 and the primitive linear form vanishing
    at the marked point; the latter has coefficient-max exactly
    max(|u|, |v|), which the threshold must reach.
    """
    y = spec.marked_point
    return Fraction(max(abs(y.numerator), abs(y.denominator)))


def check_fe_bounds(spec: PairSpec, n: int, m: int,
                    cap: int = DEFAULT_CAP) -> DiscrepancyReport:
    """Both finite-level sandwiches for twisting the vanishing divisor by the
    marked point, with the log-2 rescale and the log-6 rank slack; exact."""
    if spec.norm_mode != COEFF_MAX:
        raise ValueError("exact sandwich checks require the coeff-max mode")
    if n < 0:
        raise ValueError("twist order must be >= 0")
    aux_thr = _auxiliary_threshold(spec)
    # witness sanity: both auxiliary sections really are small
    assert aux_thr >= 1
    rank_full = m * spec.degree + 1
    checks: list[CheckEntry] = []
    mult = Fraction(2) * aux_thr**n
    for star in ("ss", "s"):
        n_base = level_count(spec, m, Fraction(0), star, cap)
        n_plus = _twisted_count(spec, m, n, star, cap)
        checks.append(CheckEntry("down-twist-monotone", star,
                                 log_of_int(n_plus), log_of_int(n_base),
                                 n_plus <= n_base,
                                 log_of_int(n_base) - log_of_int(n_plus)))
        r_plus = _restricted_count(spec, m, n, star, mult, n, cap)
        rhs_a = n * log_of_int(r_plus) + rank_full * log_of_int(6)
        ok_a = n_base <= n_plus * r_plus**n * 6**rank_full
        lhs_a = log_of_int(n_base) - log_of_int(n_plus)
        checks.append(CheckEntry("down-twist-upper", star, lhs_a, rhs_a,
                                 ok_a, rhs_a - lhs_a))
        n_minus = _twisted_count(spec, m, -n, star, cap)
        checks.append(CheckEntry("up-twist-monotone", star,
                                 log_of_int(n_base), log_of_int(n_minus),
                                 n_base <= n_minus,
                                 log_of_int(n_minus) - log_of_int(n_base)))
        r_base = _restricted_count(spec, m, 0, star, mult, n, cap)
        rhs_b = n * log_of_int(r_base) + rank_full * log_of_int(6)
        ok_b = n_minus <= n_base * r_base**n * 6**rank_full
        lhs_b = log_of_int(n_minus) - log_of_int(n_base)
        checks.append(CheckEntry("up-twist-upper", star, lhs_b, rhs_b,
                                 ok_b, rhs_b - lhs_b))
    worst = min(checks, key=lambda e: e.slack)
    return DiscrepancyReport(
        m=m, lhs=worst.lhs, rhs=worst.rhs, bound=worst.rhs, slack=worst.slack,
        satisfied=all(c.satisfied for c in checks),
        constants_used={"n": n, "rank": rank_full,
                        "aux_threshold": str(aux_thr)},
        details=tuple(checks))


def _twisted_count(spec: PairSpec, m: int, bump: int, star: str,
                   cap: int) -> int:
    space = twisted_section_space(spec, m,
                                  order_bumps={spec.marked_point: bump})
    return sp.count_small_sections(space, star, cap).value()


def _restricted_count(spec, m, bump, star, mult, extra_degree, cap) -> int:
    order = _marked_order(spec, m, bump)
    space = twisted_section_space(spec, m,
                                  order_bumps={spec.marked_point: bump},
                                  extra_degree=extra_degree, scale_mult=mult)
    diag = space.diagonal_structure()
    if diag is not None and spec.marked_point == 0:
        bound = sp._coeff_bound(space, star)
        d = diag.get(order)
        if d is None or bound < d:
            return 1
        return 2 * (bound // d) + 1
    linmap = LinearMap((taylor_functional(spec.marked_point, order,
                                          space.ambient_dim),))
    return len(sp.image_of_sections(space, linmap, star, cap))


# ---------------------------------------------------------------------------
# Central-quantity estimates over a level window
# ---------------------------------------------------------------------------


def check_estimates_II(spec: PairSpec, flag: FlagSpec, r: Fraction,
                       eps: float, m_window: Sequence[int],
                       cap: int = DEFAULT_CAP,
                       margin: Fraction = Fraction(1)) -> list[DiscrepancyReport]:
    """Per-level central quantity against the twisted-rate bounds.

    Reports the minimal empirical slack constants per level; the theorem
    proves they exist, the lab measures whether they stabilize.
    """
    r = Fraction(r)
    if not 0 < r <= spec.slope_budget:
        raise ValueError("twist slope must satisfy 0 < r <= slope budget")
    require_good_flag(flag)
    if spec.norm_mode != COEFF_MAX:
        raise ValueError("estimates require the coeff-max mode")
    growth = float(rank_growth(spec)[0])
    logp = log(flag.prime)
    rows = []
    for m in m_window:
        consts = evaluate_constants(spec, m, flag.prime, eps, margin)
        l0 = log_of_int(level_count(spec, m, Fraction(0), "ss", cap))
        lr = log_of_int(level_count(spec, m, r, "ss", cap))
        w0, _ = full_cloud(spec, m, flag, Fraction(0), cap)
        wr, _ = full_cloud(spec, m, flag, r, cap)
        central = (l0 - lr) - (w0 - wr) * logp
        rate = float(r) * consts.twisted_gap_rate * m ** (DIM_X + 1)
        lower_core = -rate - growth * m * log(m)
        s_emp = max(0.0, (lower_core - central) / m)
        s_prime_emp = max(0.0, (central - rate) / m)
        rows.append((m, central, rate, lower_core, s_emp, s_prime_emp, consts))
    s_cap = max((row[4] for row in rows), default=0.0)
    s_prime_cap = max((row[5] for row in rows), default=0.0)
    out = []
    for m, central, rate, lower_core, s_emp, s_prime_emp, consts in rows:
        # Both bounds hold with the window-maximal empirical slack constants
        # by construction; the informative signal is whether those constants
        # stabilize (see estimates_slack_trend).
        slack = min(central - (lower_core - s_cap * m),
                    rate + s_prime_cap * m - central)
        out.append(DiscrepancyReport(
            m=m, lhs=central, rhs=rate, bound=rate, slack=slack,
            satisfied=slack >= 0,
            constants_used=dict(consts.to_jsonable(),
                                lower_slack=s_emp, upper_slack=s_prime_emp,
                                r=str(r))))
    return out


def estimates_slack_trend(reports: Sequence[DiscrepancyReport]):
    """Least-squares slope of the empirical slacks against the level."""
    def slope(key):
        pts = [(rep.m, rep.constants_used[key]) for rep in reports]
        n = len(pts)
        mx = sum(m for m, _ in pts) / n
        my = sum(v for _, v in pts) / n
        den = sum((m - mx) ** 2 for m, _ in pts)
        if den == 0:
            return 0.0
        return sum((m - mx) * (v - my) for m, v in pts) / den
    return {"lower_slack_slope": slope("lower_slack"),
            "upper_slack_slope": slope("upper_slack"),
            "max_lower_slack": max(r.constants_used["lower_slack"] for r in reports),
            "max_upper_slack": max(r.constants_used["upper_slack"] for r in reports)}


# ---------------------------------------------------------------------------
# The restricted intersection oracle and the derivative experiment
# ---------------------------------------------------------------------------


def restricted_intersection_oracle(spec: PairSpec) -> float:
    """Supremum of restricted degrees over the canonical approximation family.

    Supported for the marked point at the origin.  Family members peel the
    vanishing divisor off the pair with metrics concentrated away from the
    marked point, so the restricted degree is exactly the pair's total
    archimedean scale.  This is a family supremum (hence a lower bound for
    the true supremum over all approximations); the derivative experiment
    cross-checks it independently.
    """
    if spec.marked_point != 0:
        raise ValueError("the analytic oracle supports the family anchored at the origin")
    total = spec.scale_exp()
    if total.rho == 0 and total.mult == 1:
        return 0.0  # no archimedean mass anywhere in the family
    if spec.total_vanishing >= spec.degree:
        raise ValueError("pair is not big along the marked point")
    return total.log_float()


def derivative_experiment(spec: PairSpec, r_grid: Sequence[Fraction],
                          m_window: Sequence[int] = range(8, 41),
                          cap: int = DEFAULT_CAP) -> DerivativeReport:
    """Finite-difference derivative of the truncated volume along the marked
    point, against (dim X + 1) times the restricted intersection oracle."""
    grid = sorted(Fraction(r) for r in r_grid)
    if spec.marked_multiplicity <= 0:
        raise ValueError("derivative experiment needs positive vanishing at the marked point")
    if not grid or any(-r not in grid for r in grid) or 0 in grid:
        raise ValueError("grid must be symmetric around 0 and exclude 0")
    if any(abs(r) > spec.slope_budget for r in grid):
        raise ValueError("grid exceeds the slope budget")
    if any(spec.marked_multiplicity + r < 0 for r in grid):
        raise ValueError("grid exceeds the marked-point multiplicity")
    v0 = truncated_avol(spec, Fraction(0), m_window, cap).extrapolated
    vals = {r: truncated_avol(spec, r, m_window, cap).extrapolated
            for r in grid}
    left = tuple((vals[r] - v0) / float(r) for r in grid if r < 0)
    right = tuple((vals[r] - v0) / float(r) for r in grid if r > 0)
    pos = [r for r in grid if r > 0]
    sym = sum((vals[r] - vals[-r]) / (2.0 * float(r)) for r in pos) / len(pos)
    oracle = (DIM_X + 1) * restricted_intersection_oracle(spec)
    gap = abs(abs(sym) - oracle) / oracle if oracle else 0.0
    return DerivativeReport(tuple(grid), left, right, sym, oracle, gap)


# ---------------------------------------------------------------------------
# Concavity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcavityReport:
    concave: bool
    slope_monotone: bool
    violations: tuple[int, ...]
    second_differences: tuple[float, ...]

    def to_jsonable(self):
        from .reports import fmt_float
        return {"concave": self.concave, "slope_monotone": self.slope_monotone,
                "violations": list(self.violations),
                "second_differences": [fmt_float(x) for x in self.second_differences]}


def concavity_check(samples: Sequence[tuple[Fraction, float]],
                    root_exponent: int = DIM_X + 1,
                    tol: float = 1e-9) -> ConcavityReport:
    """Discrete concavity of value^(1/root_exponent) over an increasing grid."""
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    rs = [float(r) for r, _ in samples]
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError("grid must be strictly increasing")
    f = [max(0.0, float(v)) ** (1.0 / root_exponent) for _, v in samples]
    slopes = [(f[i + 1] - f[i]) / (rs[i + 1] - rs[i]) for i in range(len(f) - 1)]
    second = tuple(s2 - s1 for s1, s2 in zip(slopes, slopes[1:]))
    violations = tuple(i for i, d in enumerate(second) if d > tol)
    return ConcavityReport(not violations, not violations, violations, second)


# ---------------------------------------------------------------------------
# Homogeneity and Brunn-Minkowski
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneityReport:
    scale_factor: int
    identity_levels: tuple[int, ...]
    identity_exact: bool
    restricted_ratio: float
    ratio_target: float
    bm_volumes_ok: bool
    bm_bodies_exact: bool
    sum_body_length: Fraction
    summand_lengths: tuple[Fraction, Fraction]

    @property
    def ok(self) -> bool:
        return self.identity_exact and self.bm_volumes_ok and self.bm_bodies_exact

    def to_jsonable(self):
        from .reports import fmt_float, frac_str
        return {
            "scale_factor": self.scale_factor,
            "identity_levels": list(self.identity_levels),
            "identity_exact": self.identity_exact,
            "restricted_ratio": fmt_float(self.restricted_ratio),
            "ratio_target": fmt_float(self.ratio_target),
            "bm_volumes_ok": self.bm_volumes_ok,
            "bm_bodies_exact": self.bm_bodies_exact,
            "sum_body_length": frac_str(self.sum_body_length),
            "summand_lengths": [frac_str(x) for x in self.summand_lengths],
            "satisfied": self.ok,
        }


def check_homogeneity_bm(spec: PairSpec, a: int,
                         m_window: Sequence[int] = range(4, 21),
                         partner: PairSpec | None = None,
                         flag: FlagSpec | None = None,
                         cap: int = DEFAULT_CAP,
                         bm_slack: float = 0.02) -> HomogeneityReport:
    """(i) exact level identity for integer rescaling of the pair,
    (ii) restricted-volume homogeneity ratio, (iii) Brunn-Minkowski for a
    partner pair, both via estimates and exactly via body sums."""
    if a < 1:
        raise ValueError("scale factor must be >= 1")
    scaled = spec.scaled(a)
    identity_levels = tuple(m_window)
    identity_exact = True
    for m in identity_levels:
        lhs = restricted_section_set(scaled, m, variant="CL", cap=cap).count()
        rhs = restricted_section_set(spec, a * m, variant="CL", cap=cap).count()
        if lhs != rhs:
            identity_exact = False
            break
    est_base = truncated_restricted_vol(spec, "CL", m_window, cap)
    est_scaled = truncated_restricted_vol(scaled, "CL", m_window, cap)
    ratio = (est_scaled.extrapolated / est_base.extrapolated
             if est_base.extrapolated else float("nan"))
    target = float(a ** (DIM_Y + 1))
    partner = partner or PairSpec(spec.degree,
                                  spec.arch_scale / 2 + Fraction(1, 4),
                                  spec.norm_mode, spec.vanishing,
                                  spec.marked_point, spec.slope_budget)
    both = pair_sum(spec, partner)
    v1 = truncated_restricted_vol(spec, "CL", m_window, cap).extrapolated
    v2 = truncated_restricted_vol(partner, "CL", m_window, cap).extrapolated
    v12 = truncated_restricted_vol(both, "CL", m_window, cap).extrapolated
    power = 1.0 / (DIM_Y + 1)
    bm_volumes_ok = v12 ** power >= (v1 ** power + v2 ** power) * (1 - bm_slack)
    flag = flag or FlagSpec(spec.marked_point, 2, RESTRICTED)
    rng = list(m_window)
    b1, _ = build_okounkov_body(spec, flag, RESTRICTED_CL, rng, cap=cap)
    b2, _ = build_okounkov_body(partner, flag, RESTRICTED_CL, rng, cap=cap)
    bsum = minkowski_sum(b1, b2)
    len1 = polytope_volume(b1) if not b1.is_empty else Fraction(0)
    len2 = polytope_volume(b2) if not b2.is_empty else Fraction(0)
    lensum = polytope_volume(bsum) if not bsum.is_empty else Fraction(0)
    bm_bodies_exact = lensum >= len1 + len2
    return HomogeneityReport(a, identity_levels, identity_exact, ratio, target,
                             bm_volumes_ok, bm_bodies_exact, lensum,
                             (len1, len2))


# ---------------------------------------------------------------------------
# Body-vs-count consistency
# ---------------------------------------------------------------------------


def body_volume_consistency(spec: PairSpec, flag: FlagSpec,
                            m_range: Sequence[int],
                            cap: int = DEFAULT_CAP) -> dict:
    """(dim+1)! * body volume * log p against the truncated volume estimate.

    The tolerance budget comes from the asymptotic discrepancy rate divided
    by log p, which is exactly the error term the finite-level theory allows.
    """
    body, stats = build_okounkov_body(spec, flag, YM_FULL, m_range, cap=cap)
    vol = float(polytope_volume(body)) if not body.is_empty else 0.0
    est = truncated_avol(spec, Fraction(0), m_range, cap)
    logp = log(flag.prime)
    factorial = 2  # (dim X + 1)!
    lhs = factorial * vol * logp
    consts = evaluate_constants(spec, max(m_range), flag.prime, 1.0)
    budget = factorial * consts.asymptotic_gap_rate / logp
    return {
        "body_volume": vol,
        "scaled_body_volume": lhs,
        "count_extrapolation": est.extrapolated,
        "gap": abs(lhs - est.extrapolated),
        "budget": budget,
        "within_budget": abs(lhs - est.extrapolated) <= budget,
        "stats": stats.to_jsonable(),
    }

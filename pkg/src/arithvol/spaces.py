"""Adelically normed vector spaces realized as integer lattices with norm oracles.

A space is a full-column-rank integer lattice inside Q^n together with an
archimedean norm: either the exact coefficient-max (Gauss) norm or a
certified-interval supremum norm on the unit circle.  The finite-place data
is entirely encoded by the lattice: "all finite norms <= 1" means membership.

Small/strictly-small section sets, rescaling, induced subspace norms, image
counts, CL-hulls, quotient-norm sections, and the four counting inequalities
are all computed exactly in coefficient-max mode.  Interval mode reports
[lo, hi] section counts instead of guessing boundary cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as _int_gcd
from typing import Iterable, Sequence

import mpmath

from . import lattices as lat
from .lattices import EnumerationBudgetExceeded
from .lp import min_max_abs_on_fiber
from .reports import CheckEntry, DiscrepancyReport
from .scaling import ScaleExp, cmp_frac_exp, log_of_int

DEFAULT_CAP = 10**7

COEFF_MAX = "coeff-max"
CIRCLE_SUP = "circle-sup-interval"


@dataclass(frozen=True)
class ArchNorm:
    """Archimedean norm oracle: exp(-s) times a base norm.

    ``scale`` is the threshold exp(s) represented exactly; rational shifts and
    log-of-integer twists (log 2, log 6, log l) both stay exact.
    """

    mode: str
    scale: ScaleExp = ScaleExp()

    def __post_init__(self):
        if self.mode not in (COEFF_MAX, CIRCLE_SUP):
            raise ValueError(f"unknown norm mode {self.mode!r}")

    @staticmethod
    def coeff_max(lam: Fraction = Fraction(0)) -> "ArchNorm":
        return ArchNorm(COEFF_MAX, ScaleExp(Fraction(lam)))

    @staticmethod
    def circle_sup(lam: Fraction = Fraction(0)) -> "ArchNorm":
        return ArchNorm(CIRCLE_SUP, ScaleExp(Fraction(lam)))

    def shifted(self, lam: Fraction) -> "ArchNorm":
        return ArchNorm(self.mode, self.scale.shifted(lam))

    def scaled_by(self, mult: Fraction) -> "ArchNorm":
        return ArchNorm(self.mode, self.scale.scaled(mult))


@dataclass(frozen=True)
class CountInterval:
    """Certified enclosure [lo, hi] for a section count; exact when lo == hi."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError("invalid count interval")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def value(self) -> int:
        if not self.exact:
            raise ValueError("count is not exact")
        return self.lo


@dataclass(frozen=True)
class AdelicSpace:
    """Integer lattice + archimedean norm oracle.

    ``lattice_basis`` has the basis vectors as columns (n x k, full column
    rank); rows are canonicalized to Hermite form so equal lattices compare
    equal.  Rank 0 (no columns) is the zero space.
    """

    ambient_dim: int
    lattice_basis: tuple[tuple[int, ...], ...]
    norm: ArchNorm
    label: str = ""

    def __post_init__(self):
        if self.lattice_basis and len(self.lattice_basis) != self.ambient_dim:
            raise ValueError("basis matrix must have ambient_dim rows")
        if not self.lattice_basis or not self.lattice_basis[0]:
            object.__setattr__(self, "lattice_basis", ())
            return
        ncols = len(self.lattice_basis[0])
        rows = lat.row_hnf(lat.transpose(self.lattice_basis), self.ambient_dim)
        if len(rows) < ncols:
            raise ValueError("lattice basis columns are linearly dependent")
        object.__setattr__(
            self, "lattice_basis",
            tuple(tuple(int(x) for x in row) for row in lat.transpose(rows)))

    # -- structure ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.lattice_basis[0]) if self.lattice_basis else 0

    @property
    def basis_rows(self) -> lat.IntMatrix:
        return lat.transpose(self.lattice_basis) if self.lattice_basis else ()

    def diagonal_structure(self) -> dict[int, int] | None:
        """coordinate -> positive divisor, when every basis vector is a
        multiple of a distinct unit vector (enables closed-form counting)."""
        out: dict[int, int] = {}
        for row in self.basis_rows:
            support = [i for i, x in enumerate(row) if x]
            if len(support) != 1:
                return None
            out[support[0]] = abs(row[support[0]])
        return out

    def threshold(self) -> ScaleExp:
        """The archimedean bound: norm(v) < 1 iff base(v) < threshold."""
        return self.norm.scale

    def with_extra(self, mult: Fraction = Fraction(1),
                   shift: Fraction = Fraction(0)) -> "AdelicSpace":
        return AdelicSpace(self.ambient_dim, self.lattice_basis,
                           ArchNorm(self.norm.mode,
                                    self.norm.scale.scaled(mult).shifted(shift)),
                           self.label)


def rescale(space: AdelicSpace, lam: Fraction) -> AdelicSpace:
    """Same lattice, archimedean scale increased by the rational lam."""
    return AdelicSpace(space.ambient_dim, space.lattice_basis,
                       space.norm.shifted(Fraction(lam)), space.label)


def subspace(space: AdelicSpace, sublattice_cols) -> AdelicSpace:
    """Restrict the norm oracle to a sublattice (columns must lie in the lattice)."""
    rows = space.basis_rows
    for col in lat.transpose(sublattice_cols):
        if lat.hnf_solve(rows, col) is None:
            raise ValueError("sublattice basis vector is not in the lattice")
    return AdelicSpace(space.ambient_dim,
                       tuple(tuple(int(x) for x in r) for r in sublattice_cols),
                       space.norm, space.label + "|sub")


def induced_subspace(space: AdelicSpace, sub_rows: lat.IntMatrix) -> AdelicSpace:
    """Subspace with *induced* norms: lattice = space lattice  span(sub_rows).

    This is the saturation of the row span inside the space's lattice, which
    is what the counting lemmas mean by "subspace norms induced from" the
    ambient space.
    """
    rows = space.basis_rows
    coords = []
    for r in sub_rows:
        c = lat.hnf_solve(rows, r)
        if c is None:
            raise ValueError("subspace generator is not in the lattice")
        coords.append(c)
    sat_coords = lat.saturation(coords, space.rank) if coords else ()
    new_rows = tuple(
        tuple(sum(c[i] * rows[i][j] for i in range(len(rows)))
              for j in range(space.ambient_dim))
        for c in sat_coords)
    cols = lat.transpose(lat.row_hnf(new_rows, space.ambient_dim)) \
        if new_rows else ()
    return AdelicSpace(space.ambient_dim, cols, space.norm,
                       space.label + "|ind")


@dataclass(frozen=True)
class LinearMap:
    """Rational linear map on the ambient coordinate space.

    ``kernel_basis`` spans the integer points of the kernel (columns).
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    kernel_basis: tuple[tuple[int, ...], ...] = field(default=None)  # type: ignore

    def __post_init__(self):
        mat = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if self.kernel_basis is None:
            n_in = len(mat[0]) if mat else 0
            ker_rows = lat.kernel_rational(mat, n_in)
            object.__setattr__(self, "kernel_basis", lat.transpose(ker_rows))

    @property
    def n_out(self) -> int:
        return len(self.matrix)

    @property
    def n_in(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        return tuple(sum(Fraction(a) * Fraction(x) for a, x in zip(row, vec))
                     for row in self.matrix)


# ---------------------------------------------------------------------------
# Section enumeration and counting
# ---------------------------------------------------------------------------


def _coeff_bound(space: AdelicSpace, kind: str, mult: Fraction = Fraction(1)) -> int:
    thr = space.threshold().scaled(mult)
    return thr.int_bound(strict=(kind == "ss"))


def count_small_sections(space: AdelicSpace, kind: str,
                         cap: int = DEFAULT_CAP,
                         mult: Fraction = Fraction(1)) -> CountInterval:
    """#{lattice v : arch norm < 1 (ss) or <= 1 (s)}; exact in coeff-max mode.

    ``mult`` scales the threshold (the log 2 / log l twists of the lemmas).
    """
    if kind not in ("ss", "s"):
        raise ValueError("kind must be 'ss' or 's'")
    if space.norm.mode == COEFF_MAX:
        bound = _coeff_bound(space, kind, mult)
        if bound < 0:
            return CountInterval(1, 1)  # only the zero section
        diag = space.diagonal_structure()
        if diag is not None:
            total = 1
            for d in diag.values():
                total *= 2 * (bound // d) + 1
            return CountInterval(total, total)
        n = lat.count_lattice_points_in_box(space.basis_rows, bound, cap,
                                            space.ambient_dim)
        return CountInterval(n, n)
    vecs_lo, vecs_hi = _interval_sections(space, kind, cap, mult)
    return CountInterval(len(vecs_lo), len(vecs_hi))


def section_vectors(space: AdelicSpace, kind: str,
                    cap: int = DEFAULT_CAP,
                    mult: Fraction = Fraction(1)) -> list[tuple[int, ...]]:
    """Exact section list (coeff-max mode only), lex-sorted, zero included."""
    if space.norm.mode != COEFF_MAX:
        raise ValueError("exact section lists need the coeff-max mode")
    bound = _coeff_bound(space, kind, mult)
    if bound < 0 or space.rank == 0:
        return [tuple([0] * space.ambient_dim)]
    return lat.lattice_points_in_box(space.basis_rows, bound, cap,
                                     space.ambient_dim)


def enumerate_small_sections(space: AdelicSpace, kind: str,
                             cap: int = DEFAULT_CAP):
    """(vectors, CountInterval).  In interval mode the vector list is the
    certified-in set and boundary-straddling vectors count only toward hi."""
    if space.norm.mode == COEFF_MAX:
        vecs = section_vectors(space, kind, cap)
        return vecs, CountInterval(len(vecs), len(vecs))
    vecs_lo, vecs_hi = _interval_sections(space, kind, cap)
    return vecs_lo, CountInterval(len(vecs_lo), len(vecs_hi))


def _interval_sections(space: AdelicSpace, kind: str, cap: int,
                       mult: Fraction = Fraction(1)):
    """Certified-in and possibly-in section lists under the circle-sup norm."""
    thr = space.threshold().scaled(mult)
    # |c_j| <= sup|phi| on the circle, so candidates live in the coeff box.
    bound = thr.int_bound(strict=(kind == "ss"))
    if bound < 0 or space.rank == 0:
        zero = [tuple([0] * space.ambient_dim)]
        return zero, list(zero)
    candidates = lat.lattice_points_in_box(space.basis_rows, bound, cap,
                                           space.ambient_dim)
    sure: list[tuple[int, ...]] = []
    maybe: list[tuple[int, ...]] = []
    for v in candidates:
        l1 = Fraction(sum(abs(x) for x in v))
        if thr.cmp_fraction(l1) > 0:       # l1 upper bound already below
            sure.append(v)
            continue
        # values at +-1 and the coefficient max are exact lower bounds
        at_plus = abs(sum(v))
        at_minus = abs(sum(c if i % 2 == 0 else -c for i, c in enumerate(v)))
        cheap_lo = Fraction(max(at_plus, at_minus, max(abs(x) for x in v)))
        if thr.cmp_fraction(cheap_lo) < 0:
            continue
        if thr.cmp_fraction(cheap_lo) == 0 and kind == "ss":
            continue
        lo, hi = circle_sup_enclosure(v)
        side_hi = thr.cmp_fraction(hi)     # sign of thr - hi
        side_lo = thr.cmp_fraction(lo)
        if side_hi > 0:
            sure.append(v)
        elif side_lo < 0:
            continue
        elif side_lo == 0 and kind == "s" and lo == hi:
            sure.append(v)                 # exactly on the non-strict boundary
        else:
            maybe.append(v)
    return sure, sure + maybe


def circle_sup_enclosure(coeffs: Sequence[int], grid: int = 0,
                         prec: int = 80) -> tuple[Fraction, Fraction]:
    """Certified enclosure of sup_{|z|=1} |phi(z)| for integer coefficients.

    Grid evaluation in interval arithmetic plus the Bernstein derivative
    bound |phi'| <= deg * sup|phi| on the circle.
    """
    cs = [int(c) for c in coeffs]
    deg = max((i for i, c in enumerate(cs) if c), default=-1)
    if deg <= 0:
        v = Fraction(abs(cs[0]) if cs else 0)
        return v, v
    n = grid or max(8 * deg, 64)
    old = mpmath.iv.prec
    lo_best = Fraction(max(abs(c) for c in cs))  # Cauchy: |c_j| <= sup
    hi_grid = None
    try:
        mpmath.iv.prec = prec
        two_pi = 2 * mpmath.iv.pi
        for k in range(n):
            theta = two_pi * k / n
            zr, zi = mpmath.iv.cos(theta), mpmath.iv.sin(theta)
            re = mpmath.iv.mpf(0)
            im = mpmath.iv.mpf(0)
            for c in reversed(cs):
                re, im = re * zr - im * zi + c, re * zi + im * zr
            mag2 = re * re + im * im
            lo2 = mag2.a if mag2.a > 0 else mpmath.mpf(0)
            mag = mpmath.iv.sqrt(mpmath.iv.mpf([lo2, mag2.b]))
            lo_best = max(lo_best, _frac_from_mpf(mag.a, -1))
            up = _frac_from_mpf(mag.b, +1)
            hi_grid = up if hi_grid is None else max(hi_grid, up)
    finally:
        mpmath.iv.prec = old
    # sup <= grid max / (1 - pi*deg/n); use pi < 355/113 for a rational bound.
    pi_ub = Fraction(355, 113)
    denom = 1 - pi_ub * deg / n
    if denom <= 0:
        raise ValueError("grid too coarse for the Bernstein correction")
    return lo_best, hi_grid / denom


def _frac_from_mpf(x, direction: int) -> Fraction:
    import math
    f = float(x)
    padded = math.nextafter(f, math.inf if direction > 0 else -math.inf)
    return Fraction(padded)


# ---------------------------------------------------------------------------
# Images, CL-hulls, quotient norms
# ---------------------------------------------------------------------------


def image_of_sections(space: AdelicSpace, linmap: LinearMap, kind: str,
                      cap: int = DEFAULT_CAP) -> list[tuple[Fraction, ...]]:
    """Sorted distinct images of the kind-section set under the map."""
    if linmap.n_in != space.ambient_dim:
        raise ValueError("map domain dimension mismatch")
    vecs = section_vectors(space, kind, cap)
    return sorted({linmap.apply(v) for v in vecs})


def image_count(space: AdelicSpace, linmap: LinearMap, kind: str,
                cap: int = DEFAULT_CAP) -> CountInterval:
    if space.norm.mode == COEFF_MAX:
        n = len(image_of_sections(space, linmap, kind, cap))
        return CountInterval(n, n)
    lo_vecs, hi_vecs = _interval_sections(space, kind, cap)
    lo = len({linmap.apply(v) for v in lo_vecs})
    hi = len({linmap.apply(v) for v in hi_vecs})
    return CountInterval(min(lo, hi), max(lo, hi))


def cl_hull(vectors: Iterable[Sequence[Fraction]],
            cap: int = DEFAULT_CAP) -> list[tuple[Fraction, ...]]:
    """Integer span of the input intersected with its rational convex hull.

    Exactly enumerated; contains the input and is idempotent.  Spans of rank
    above 3 are unsupported and raise.
    """
    from .geometry import convex_hull

    vecs = sorted({tuple(Fraction(x) for x in v) for v in vectors})
    if not vecs:
        return []
    n = len(vecs[0])
    den = 1
    for v in vecs:
        for x in v:
            den = den * x.denominator // _int_gcd(den, x.denominator)
    int_rows = [tuple(int(x * den) for x in v) for v in vecs]
    basis = lat.row_hnf(int_rows, n)
    rank = len(basis)
    if rank > 3:
        raise ValueError(f"integer span has rank {rank} > 3, unsupported")
    if rank == 0:
        return [vecs[0]]  # the single vector 0
    coords = [lat.hnf_solve(basis, r) for r in int_rows]
    hull = convex_hull(coords, rank)
    bounds = [0] * rank
    for c in coords:
        for i, x in enumerate(c):
            bounds[i] = max(bounds[i], abs(x))
    total = 1
    for b in bounds:
        total *= 2 * b + 1
    if total > cap:
        raise EnumerationBudgetExceeded(
            f"CL-hull grid of {total} points exceeds cap {cap}")
    out = []
    from itertools import product as _product
    for c in _product(*(range(-b, b + 1) for b in bounds)):
        if tuple(Fraction(x) for x in c) in hull:
            pt = tuple(Fraction(sum(c[i] * basis[i][j] for i in range(rank)), den)
                       for j in range(n))
            out.append(pt)
    return sorted(out)


def image_lattice_rows(space: AdelicSpace, linmap: LinearMap):
    """(denominator, HNF rows) with rows/den a basis of map(lattice)."""
    cols = [linmap.apply(col) for col in
            (tuple(r[j] for r in space.lattice_basis)
             for j in range(space.rank))]
    den = 1
    for c in cols:
        for x in c:
            den = den * x.denominator // _int_gcd(den, x.denominator)
    rows = lat.row_hnf([tuple(int(x * den) for x in c) for c in cols],
                       linmap.n_out)
    return den, rows


def quotient_norm_sections(space: AdelicSpace, linmap: LinearMap,
                           cap: int = DEFAULT_CAP):
    """Image-lattice points of quotient norm < 1, with their exact count.

    The quotient norm of y is the infimum of the archimedean norm over the
    real preimage fiber, an exact linear program in coeff-max mode.
    """
    if space.norm.mode != COEFF_MAX:
        raise ValueError("quotient norms require the exact coeff-max mode")
    if linmap.n_in != space.ambient_dim:
        raise ValueError("map domain dimension mismatch")
    if space.rank == 0:
        zero = [tuple([Fraction(0)] * linmap.n_out)]
        return zero, CountInterval(1, 1)
    den, rows = image_lattice_rows(space, linmap)
    if len(rows) < linmap.n_out:
        raise ValueError("map is not surjective onto its stated codomain lattice")
    basis_cols = [tuple(Fraction(r[j]) for r in space.lattice_basis)
                  for j in range(space.rank)]
    thr = space.threshold()
    if len(rows) == 1:
        gen = tuple(Fraction(x, den) for x in rows[0])
        gamma = min_max_abs_on_fiber(basis_cols, linmap.matrix, gen)
        if gamma <= 0:
            raise ValueError("quotient norm certification failed (flat fiber)")
        kmax = thr.scaled(1 / gamma).int_bound(strict=True)
        pts = [tuple(k * g for g in gen) for k in range(-kmax, kmax + 1)]
        n = len(pts)
        return sorted(pts), CountInterval(n, n)
    # Higher-rank image: enumerate candidates inside the image of the norm box.
    box = thr.int_bound(strict=True)
    rowsum = max(
        sum(abs(Fraction(x)) for x in row) for row in linmap.matrix)
    cand_bound = int(rowsum * box * den) + 1
    candidates = lat.lattice_points_in_box(rows, cand_bound, cap, linmap.n_out)
    out = []
    for c in candidates:
        y = tuple(Fraction(x, den) for x in c)
        if all(v == 0 for v in y):
            out.append(y)
            continue
        gamma = min_max_abs_on_fiber(basis_cols, linmap.matrix, y)
        if thr.cmp_fraction(gamma) > 0:
            out.append(y)
    n = len(out)
    return sorted(out), CountInterval(n, n)


# ---------------------------------------------------------------------------
# The counting-inequality suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RescaleInstance:
    space: AdelicSpace
    lam: Fraction


@dataclass(frozen=True)
class SequenceInstance:
    """Space plus a saturated kernel subspace; extra_map feeds the diagram check."""

    space: AdelicSpace
    kernel_rows: tuple[tuple[int, ...], ...]
    extra_map: tuple[tuple[Fraction, ...], ...] | None = None


@dataclass(frozen=True)
class FiltrationInstance:
    """Proper chain of saturated subspaces below the full space (rows each)."""

    space: AdelicSpace
    chain_rows: tuple[tuple[tuple[int, ...], ...], ...]


KINDS = ("rescale", "exact_seq", "combined", "filtration", "quot_exact")


def _require_exact(space: AdelicSpace):
    if space.norm.mode != COEFF_MAX:
        raise ValueError("exact verification demands exact (coeff-max) norms")


def _two_kind_vectors(space: AdelicSpace, cap: int, mult: Fraction = Fraction(1)):
    """(ss sections, s sections), enumerating once at the weaker bound."""
    b_s = _coeff_bound(space, "s", mult)
    b_ss = _coeff_bound(space, "ss", mult)
    if b_s < 0:
        zero = [tuple([0] * space.ambient_dim)]
        return list(zero), list(zero)
    if space.rank == 0:
        zero = [tuple([0] * space.ambient_dim)]
        return list(zero), list(zero)
    s_list = lat.lattice_points_in_box(space.basis_rows, b_s, cap,
                                       space.ambient_dim)
    if b_ss == b_s:
        return list(s_list), s_list
    if b_ss < 0:
        return [tuple([0] * space.ambient_dim)], s_list
    ss_list = [v for v in s_list if max(abs(x) for x in v) <= b_ss]
    return ss_list, s_list


def _coset_count(vectors, modulus_rows) -> int:
    if not modulus_rows:
        return len(set(vectors))
    return len({lat.reduce_mod_lattice(modulus_rows, v) for v in vectors})


def _entry(name, star, logl, logr, ok, *, clamp=True):
    slack = logr - logl
    if ok and clamp and slack < 0:
        slack = 0.0
    return CheckEntry(name, star, logl, logr, ok, slack)


def verify_counting_inequality(kind: str, instance,
                               cap: int = DEFAULT_CAP) -> DiscrepancyReport:
    """Exactly verify one counting-lemma kind on one instance.

    All comparisons are integer comparisons or certified rational-vs-exp
    comparisons; the returned satisfied flag carries no numerical tolerance.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    checks: list[CheckEntry] = []
    if kind == "rescale":
        space, lam = instance.space, Fraction(instance.lam)
        _require_exact(space)
        if lam < 0:
            raise ValueError("rescale bound needs lam >= 0")
        rk = space.rank
        scaled = rescale(space, lam)
        for star in ("ss", "s"):
            n1 = count_small_sections(space, star, cap).value()
            n2 = count_small_sections(scaled, star, cap).value()
            lo_ok = n2 >= n1
            checks.append(_entry("rescale-lower", star,
                                 log_of_int(n1), log_of_int(n2), lo_ok))
            if rk == 0:
                up_ok = n2 <= n1
            else:
                up_ok = cmp_frac_exp(Fraction(n2, n1 * 3**rk), lam * rk) <= 0
            rhs = log_of_int(n1) + rk * (float(lam) + log_of_int(3))
            checks.append(_entry("rescale-upper", star, log_of_int(n2), rhs, up_ok))
    elif kind in ("exact_seq", "combined"):
        space = instance.space
        _require_exact(space)
        sub = induced_subspace(space, instance.kernel_rows)
        mod = sub.basis_rows
        for star in ("ss", "s"):
            ss_v, s_v = _two_kind_vectors(space, cap)
            vecs = ss_v if star == "ss" else s_v
            n_v = len(vecs)
            n_v2 = len(_two_kind_vectors(space, cap, Fraction(2))[0 if star == "ss" else 1])
            ss_w, s_w = _two_kind_vectors(sub, cap)
            n_w = len(ss_w if star == "ss" else s_w)
            n_w2 = len(_two_kind_vectors(sub, cap, Fraction(2))[0 if star == "ss" else 1])
            r_img = _coset_count(vecs, mod)
            if kind == "exact_seq":
                checks.append(_entry(
                    "sequence-upper", star, log_of_int(n_v),
                    log_of_int(n_w2) + log_of_int(r_img),
                    n_v <= n_w2 * r_img))
                checks.append(_entry(
                    "sequence-lower", star, log_of_int(n_w) + log_of_int(r_img),
                    log_of_int(n_v2), n_v2 >= n_w * r_img))
            else:
                rk_v, rk_w = space.rank, sub.rank
                mid = log_of_int(n_v) - log_of_int(n_w) - log_of_int(r_img)
                checks.append(_entry(
                    "combined-lower", star, -rk_v * log_of_int(6), mid,
                    n_w * r_img <= n_v * 6**rk_v))
                checks.append(_entry(
                    "combined-upper", star, mid, rk_w * log_of_int(6),
                    n_v <= n_w * r_img * 6**rk_w))
    elif kind == "filtration":
        space = instance.space
        _require_exact(space)
        chain = [space] + [induced_subspace(space, rows)
                           for rows in instance.chain_rows]
        l = len(chain)
        for star in ("ss", "s"):
            idx = 0 if star == "ss" else 1
            prod = 1
            for i, piece in enumerate(chain):
                vecs = _two_kind_vectors(piece, cap)[idx]
                nxt = chain[i + 1].basis_rows if i + 1 < l else ()
                prod *= _coset_count(vecs, nxt)
            n_l = len(_two_kind_vectors(space, cap, Fraction(l))[idx])
            checks.append(_entry(
                "filtration", star, log_of_int(prod), log_of_int(n_l),
                n_l >= prod))
    else:  # quot_exact
        space = instance.space
        _require_exact(space)
        sub = induced_subspace(space, instance.kernel_rows)
        mod = sub.basis_rows
        gmat = instance.extra_map or ()
        apply_g = (lambda v: tuple(
            sum(Fraction(a) * x for a, x in zip(row, v)) for row in gmat))
        for star in ("ss", "s"):
            idx = 0 if star == "ss" else 1
            vecs = _two_kind_vectors(space, cap)[idx]
            vecs2 = _two_kind_vectors(space, cap, Fraction(2))[idx]
            wv = _two_kind_vectors(sub, cap)[idx]
            wv2 = _two_kind_vectors(sub, cap, Fraction(2))[idx]
            r_of = lambda v: (lat.reduce_mod_lattice(mod, v) if mod else v,
                              apply_g(v))
            a_img = len({r_of(v) for v in vecs})
            a2_img = len({r_of(v) for v in vecs2})
            b_img = len({apply_g(v) for v in wv})
            b2_img = len({apply_g(v) for v in wv2})
            c_img = _coset_count(vecs, mod)
            checks.append(_entry(
                "diagram-upper", star, log_of_int(a_img),
                log_of_int(b2_img) + log_of_int(c_img),
                a_img <= b2_img * c_img))
            checks.append(_entry(
                "diagram-lower", star, log_of_int(b_img) + log_of_int(c_img),
                log_of_int(a2_img), a2_img >= b_img * c_img))
    worst = min(checks, key=lambda e: e.slack)
    return DiscrepancyReport(
        m=0, lhs=worst.lhs, rhs=worst.rhs, bound=worst.rhs,
        slack=worst.slack, satisfied=all(e.satisfied for e in checks),
        constants_used={"kind": kind, "rank": instance.space.rank},
        details=tuple(checks))


# ---------------------------------------------------------------------------
# Random instances (seeded, budget-aware)
# ---------------------------------------------------------------------------


def _random_unimodular(rng, k: int, mixes: int = 3):
    mat = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(mixes):
        i, j = rng.randrange(k), rng.randrange(k)
        if i != j:
            c = rng.choice((-1, 1))
            for t in range(k):
                mat[i][t] += c * mat[j][t]
    return mat


def _random_basis_rows(rng, n: int, k: int):
    pivots = sorted(rng.sample(range(n), k))
    rows = []
    for i, p in enumerate(pivots):
        row = [0] * n
        row[p] = rng.randint(1, 3)
        for q in range(p + 1, n):
            if q not in pivots[i + 1:] and rng.random() < 0.4:
                row[q] = rng.randint(-2, 2)
        rows.append(row)
    return lat.row_hnf(rows, n)


def _candidate_size(space: AdelicSpace, mult: Fraction) -> int:
    bound = _coeff_bound(space, "s", mult)
    if bound < 0 or space.rank == 0:
        return 1
    total = 1
    for b in lat._coefficient_bounds(space.basis_rows, bound):
        total *= 2 * b + 1
    return total


def random_space(rng, budget: int = 200_000,
                 worst_mult: Fraction = Fraction(6), max_rank: int = 6) -> AdelicSpace:
    """Random coeff-max space with candidate boxes kept inside the budget."""
    n = rng.randint(1, max_rank)
    k = rng.randint(1, n)
    rows = _random_basis_rows(rng, n, k)
    if rng.random() < 0.4:
        mult = Fraction(rng.choice((1, 1, 2, 3, Fraction(3, 2))))
        rho = Fraction(0)
    else:
        mult = Fraction(1)
        rho = Fraction(rng.randint(0, 16), 8)
    while True:
        space = AdelicSpace(n, lat.transpose(rows),
                            ArchNorm(COEFF_MAX, ScaleExp(rho, mult)), "random")
        if _candidate_size(space, worst_mult) <= budget:
            return space
        if rho > 0:
            rho = rho / 2 if rho > Fraction(1, 8) else Fraction(0)
        elif mult > 1:
            mult = Fraction(1)
        else:
            k = max(1, k - 1)
            rows = rows[:k]


def random_lemma_instance(kind: str, rng, budget: int = 200_000):
    """Seeded random instance for one counting-lemma kind."""
    if kind == "rescale":
        space = random_space(rng, budget, worst_mult=Fraction(8))
        lam = Fraction(rng.randint(0, 16), 8)
        while lam > 0 and _candidate_size(
                rescale(space, lam), Fraction(1)) > budget:
            lam /= 2
            if lam < Fraction(1, 16):
                lam = Fraction(0)
        return RescaleInstance(space, lam)
    space = random_space(rng, budget, worst_mult=Fraction(6))
    k = space.rank
    if kind == "filtration":
        steps = rng.randint(1, min(3, k) if k else 1)
        t_mat = _random_unimodular(rng, k) if k else []
        ranks = sorted(rng.sample(range(1, k), steps - 1), reverse=True) if k > 1 else []
        rows_chain = []
        basis = space.basis_rows
        for r in ranks:
            coords = t_mat[:r]
            rows_chain.append(tuple(
                tuple(sum(c[i] * basis[i][j] for i in range(k))
                      for j in range(space.ambient_dim)) for c in coords))
        return FiltrationInstance(space, tuple(rows_chain))
    r = rng.randint(0, k) if k else 0
    basis = space.basis_rows
    t_mat = _random_unimodular(rng, k) if k else []
    coords = t_mat[:r]
    kernel_rows = tuple(
        tuple(sum(c[i] * basis[i][j] for i in range(k))
              for j in range(space.ambient_dim)) for c in coords)
    if kind == "quot_exact":
        u = rng.randint(1, 2)
        gmat = tuple(
            tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                  for _ in range(space.ambient_dim)) for _ in range(u))
        return SequenceInstance(space, kernel_rows, gmat)
    return SequenceInstance(space, kernel_rows)


def run_lemma_suite(kinds: Sequence[str], instances: int, seed: int,
                    budget: int = 200_000, cap: int = DEFAULT_CAP):
    """Seeded batch of exact lemma verifications; returns reports per kind."""
    import random as _random

    out = []
    for kind in kinds:
        rng = _random.Random((seed, kind).__repr__())
        for i in range(instances):
            inst = random_lemma_instance(kind, rng, budget)
            rep = verify_counting_inequality(kind, inst, cap)
            out.append((kind, i, rep))
    return out


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _space_to_jsonable(space: AdelicSpace) -> dict:
    return {
        "ambient_dim": space.ambient_dim,
        "basis": [list(row) for row in space.lattice_basis],
        "scale": _frac_str(space.norm.scale.rho),
        "scale_mult": _frac_str(space.norm.scale.mult),
        "label": space.label,
    }


def _space_from_jsonable(data: dict) -> AdelicSpace:
    return AdelicSpace(
        int(data["ambient_dim"]),
        tuple(tuple(int(x) for x in row) for row in data["basis"]),
        ArchNorm(COEFF_MAX, ScaleExp(Fraction(data["scale"]),
                                     Fraction(data.get("scale_mult", 1)))),
        data.get("label", ""))


def lemma_instance_to_jsonable(kind: str, instance) -> dict:
    """JSON form: integer lattice bases, rational scales as p/q strings,
    diagram maps as rational matrices."""
    out = {"kind": kind, "space": _space_to_jsonable(instance.space)}
    if kind == "rescale":
        out["lam"] = _frac_str(instance.lam)
    elif kind == "filtration":
        out["chain"] = [[list(r) for r in rows] for rows in instance.chain_rows]
    else:
        out["kernel"] = [list(r) for r in instance.kernel_rows]
        if getattr(instance, "extra_map", None):
            out["map"] = [[_frac_str(x) for x in row]
                          for row in instance.extra_map]
    return out


def lemma_instance_from_jsonable(data: dict):
    kind = data["kind"]
    space = _space_from_jsonable(data["space"])
    if kind == "rescale":
        return kind, RescaleInstance(space, Fraction(data["lam"]))
    if kind == "filtration":
        return kind, FiltrationInstance(
            space, tuple(tuple(tuple(int(x) for x in r) for r in rows)
                         for rows in data["chain"]))
    kernel = tuple(tuple(int(x) for x in r) for r in data.get("kernel", []))
    extra = None
    if data.get("map"):
        extra = tuple(tuple(Fraction(x) for x in row) for row in data["map"])
    return kind, SequenceInstance(space, kernel, extra)

"""Exact rational convex geometry in ambient dimensions 0-3.

Polytopes are stored by their minimal vertex set (lex-sorted, exact
Fractions); the empty body is a first-class value.  Dimension three is the
ceiling because the lab only ever builds bodies in dimension at most
(arithmetic dimension) = 2 plus one slack dimension for slice experiments.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lp import membership_in_hull

Point = tuple[Fraction, ...]


def _pt(p) -> Point:
    return tuple(Fraction(x) for x in p)


@dataclass(frozen=True)
class RationalPolytope:
    """Convex body given by its minimal vertex set, lex-sorted.

    ``dim`` is the ambient dimension; an empty vertex tuple encodes the empty
    body.  Vertices are exact rational points.
    """

    dim: int
    vertices: tuple[Point, ...]

    def __post_init__(self):
        if not 0 <= self.dim <= 3:
            raise ValueError("ambient dimension must be 0..3")
        verts = tuple(sorted(_pt(v) for v in self.vertices))
        for v in verts:
            if len(v) != self.dim:
                raise ValueError("vertex/ambient dimension mismatch")
        object.__setattr__(self, "vertices", verts)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __contains__(self, point) -> bool:
        p = _pt(point)
        if len(p) != self.dim:
            raise ValueError("point dimension mismatch")
        if self.is_empty:
            return False
        return membership_in_hull(p, self.vertices)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"dim": self.dim,
             "vertices": [[_frac_str(x) for x in v] for v in self.vertices]},
            sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RationalPolytope":
        data = json.loads(text)
        return RationalPolytope(
            data["dim"],
            tuple(tuple(Fraction(x) for x in v) for v in data["vertices"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for v in self.vertices:
            writer.writerow([_frac_str(x) for x in v])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, dim: int) -> "RationalPolytope":
        rows = [row for row in csv.reader(io.StringIO(text)) if row]
        return RationalPolytope(
            dim, tuple(tuple(Fraction(x) for x in row) for row in rows))


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Hulls
# ---------------------------------------------------------------------------


def convex_hull(points: Iterable[Sequence], dim: int) -> RationalPolytope:
    """Minimal-vertex convex hull of exact rational points."""
    pts = sorted({_pt(p) for p in points})
    for p in pts:
        if len(p) != dim:
            raise ValueError("point dimension mismatch")
    if not pts:
        return RationalPolytope(dim, ())
    if dim == 0 or len(pts) == 1:
        return RationalPolytope(dim, (pts[0],))
    if dim == 1:
        return RationalPolytope(1, _dedupe((pts[0], pts[-1])))
    if dim == 2:
        return RationalPolytope(2, tuple(sorted(_hull2_order(pts))))
    return RationalPolytope(3, tuple(sorted(_extreme_points(pts))))


def _dedupe(pts):
    return tuple(sorted(set(pts)))


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull2_order(pts: list[Point]) -> list[Point]:
    """Monotone chain; returns vertices in counterclockwise cyclic order."""
    if len(pts) <= 2:
        return list(dict.fromkeys(pts))
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _support_seed(pts: list[Point]) -> list[Point]:
    seeds = set()
    d = len(pts[0])
    for i in range(d):
        seeds.add(min(pts, key=lambda p: (p[i],) + p))
        seeds.add(max(pts, key=lambda p: (p[i],) + p))
    return sorted(seeds)


def _extreme_points(pts: list[Point]) -> list[Point]:
    """Extreme points of a finite set, via exact LP membership tests.

    Incremental: grow a candidate vertex set, then one cleanup pass; both
    phases only ever solve LPs over the (small) candidate set.
    """
    if len(pts) <= 2:
        return list(pts)
    cand = _support_seed(pts)
    for p in pts:
        if p in cand:
            continue
        if not membership_in_hull(p, cand):
            cand.append(p)
    out = []
    for i, p in enumerate(cand):
        others = cand[:i] + cand[i + 1:]
        if not membership_in_hull(p, others):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# Affine rank
# ---------------------------------------------------------------------------


def _affine_basis(verts: Sequence[Point]):
    """(origin, list of independent difference vectors) spanning aff(verts)."""
    if not verts:
        return None, []
    origin = verts[0]
    basis: list[tuple[Fraction, ...]] = []
    for v in verts[1:]:
        d = tuple(a - b for a, b in zip(v, origin))
        red = _reduce_against(d, basis)
        if any(red):
            basis.append(red)
    return origin, basis


def _reduce_against(vec, basis):
    v = list(vec)
    for b in basis:
        lead = next((i for i, x in enumerate(b) if x != 0), None)
        if lead is not None and v[lead] != 0:
            f = v[lead] / b[lead]
            v = [x - f * y for x, y in zip(v, b)]
    return tuple(v)


def affine_rank(poly: RationalPolytope) -> int:
    _, basis = _affine_basis(poly.vertices)
    return len(basis)


# ---------------------------------------------------------------------------
# Volume
# ---------------------------------------------------------------------------


def polytope_volume(poly: RationalPolytope) -> Fraction:
    """Exact Euclidean volume in the ambient dimension.

    Lower-dimensional bodies have volume 0; the empty body is an error.
    """
    if poly.is_empty:
        raise ValueError("empty polytope has no volume")
    if affine_rank(poly) < poly.dim:
        return Fraction(0)
    if poly.dim == 1:
        return poly.vertices[-1][0] - poly.vertices[0][0]
    if poly.dim == 2:
        order = _hull2_order(list(poly.vertices))
        area2 = Fraction(0)
        for a, b in zip(order, order[1:] + order[:1]):
            area2 += a[0] * b[1] - b[0] * a[1]
        return abs(area2) / 2
    return _volume3(poly.vertices)


def _volume3(verts: Sequence[Point]) -> Fraction:
    n = len(verts)
    q = tuple(sum(v[i] for v in verts) / n for i in range(3))
    vol = Fraction(0)
    for normal, offset, face in _facets3(verts):
        ring = _facet_ring(face, normal)
        a0 = ring[0]
        for a, b in zip(ring[1:], ring[2:]):
            vol += abs(_det3(tuple(x - y for x, y in zip(a0, q)),
                             tuple(x - y for x, y in zip(a, q)),
                             tuple(x - y for x, y in zip(b, q))))
    return vol / 6


def _det3(a, b, c) -> Fraction:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _facets3(verts: Sequence[Point]):
    """Facet list of a full-dimensional 3-polytope: (normal, offset, face pts).

    Inequalities read normal . x <= offset; normals are primitive integer
    vectors, so the list is canonical and dedupes cleanly.
    """
    out = {}
    n = len(verts)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = verts[i], verts[j], verts[k]
                u = tuple(x - y for x, y in zip(b, a))
                w = tuple(x - y for x, y in zip(c, a))
                normal = (u[1] * w[2] - u[2] * w[1],
                          u[2] * w[0] - u[0] * w[2],
                          u[0] * w[1] - u[1] * w[0])
                if not any(normal):
                    continue
                normal = _primitive(normal)
                offset = sum(x * y for x, y in zip(normal, a))
                side = {(sum(x * y for x, y in zip(normal, v)) > offset)
                        - (sum(x * y for x, y in zip(normal, v)) < offset)
                        for v in verts}
                if 1 in side and -1 in side:
                    continue
                if 1 in side:
                    normal = tuple(-x for x in normal)
                    offset = -offset
                key = (normal, offset)
                if key not in out:
                    face = tuple(v for v in verts
                                 if sum(x * y for x, y in zip(normal, v)) == offset)
                    out[key] = (normal, offset, face)
    return list(out.values())


def _primitive(vec):
    from math import gcd
    nums = [Fraction(x) for x in vec]
    lcm = 1
    for x in nums:
        lcm = lcm * x.denominator // gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in nums]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def _facet_ring(face: Sequence[Point], normal) -> list[Point]:
    """Cyclic order of a facet's (convex-position) points."""
    drop = max(range(3), key=lambda i: abs(normal[i]))
    keep = [i for i in range(3) if i != drop]
    flat = [(p[keep[0]], p[keep[1]]) for p in face]
    order2 = _hull2_order(sorted(set(flat)))
    back = {f: p for f, p in zip(flat, face)}
    return [back[f] for f in order2]


def half_spaces(poly: RationalPolytope):
    """H-representation (normal, offset) with normal . x <= offset.

    Only what slicing and the tests need: full-dimensional bodies in
    dimensions 1-3.
    """
    if poly.is_empty:
        raise ValueError("empty polytope")
    if affine_rank(poly) < poly.dim:
        raise ValueError("H-representation requires a full-dimensional body")
    if poly.dim == 1:
        lo, hi = poly.vertices[0][0], poly.vertices[-1][0]
        return [((Fraction(-1),), -lo), ((Fraction(1),), hi)]
    if poly.dim == 2:
        order = _hull2_order(list(poly.vertices))
        out = []
        for a, b in zip(order, order[1:] + order[:1]):
            normal = _primitive((b[1] - a[1], a[0] - b[0]))
            offset = normal[0] * a[0] + normal[1] * a[1]
            if any(normal[0] * v[0] + normal[1] * v[1] > offset
                   for v in poly.vertices):
                normal = (-normal[0], -normal[1])
                offset = -offset
            out.append((normal, offset))
        return out
    return [(normal, offset) for normal, offset, _ in _facets3(poly.vertices)]


# ---------------------------------------------------------------------------
# Minkowski sums and slices
# ---------------------------------------------------------------------------


def minkowski_sum(p: RationalPolytope, q: RationalPolytope) -> RationalPolytope:
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    if p.is_empty or q.is_empty:
        return RationalPolytope(p.dim, ())
    sums = [tuple(a + b for a, b in zip(u, v))
            for u in p.vertices for v in q.vertices]
    return convex_hull(sums, p.dim)


def hyperplane_slice(poly: RationalPolytope, axis: int,
                     value) -> RationalPolytope:
    """{x in P : x_axis = value}, embedded in the remaining coordinates.

    The empty slice is a legitimate value, not an error.  Works for
    degenerate bodies too: the slice is the hull of on-plane vertices plus
    chord crossings, and every extreme point of the true slice lies on an
    edge of P, which is a vertex chord.
    """
    if axis >= poly.dim:
        raise ValueError("axis out of range")
    value = Fraction(value)
    rest = [i for i in range(poly.dim) if i != axis]
    hits: set[Point] = set()
    verts = poly.vertices
    for v in verts:
        if v[axis] == value:
            hits.add(tuple(v[i] for i in rest))
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            a, b = verts[i], verts[j]
            da, db = a[axis] - value, b[axis] - value
            if (da < 0 < db) or (db < 0 < da):
                t = da / (da - db)
                hits.add(tuple(a[k] + t * (b[k] - a[k]) for k in rest))
    return convex_hull(hits, poly.dim - 1)

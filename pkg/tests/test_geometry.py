import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from arithvol.geometry import (RationalPolytope, convex_hull, half_spaces,
                               hyperplane_slice, minkowski_sum,
                               polytope_volume)
from oracles import (certify_hull_2d, hull_vertices_by_elimination,
                     hull_vertices_by_lp, minkowski_by_pairwise_sums,
                     monte_carlo_volume_2d, slice_extent_by_lp)

frac = st.fractions(min_value=-4, max_value=4, max_denominator=8)
point2 = st.tuples(frac, frac)


def rand_points(rng, n, denom=16, span=6):
    return [(F(rng.randint(-span * denom, span * denom), denom),
             F(rng.randint(-span * denom, span * denom), denom))
            for _ in range(n)]


def test_singleton_hull():
    p = convex_hull([(0, 0)], 2)
    assert p.vertices == ((F(0), F(0)),)


def test_interior_point_removed():
    p = convex_hull([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))], 2)
    assert p.vertices == ((F(0), F(0)), (F(0), F(1)), (F(1), F(0)))


def test_hull_against_elimination_oracle():
    rng = random.Random(11)
    pts = rand_points(rng, 60)
    hull = convex_hull(pts, 2)
    assert set(hull.vertices) == hull_vertices_by_elimination(pts)


def test_elimination_and_lp_oracles_agree():
    rng = random.Random(13)
    pts = rand_points(rng, 40)
    assert hull_vertices_by_elimination(pts) == hull_vertices_by_lp(pts)


def test_hull_against_lp_oracle_large():
    rng = random.Random(5)
    pts = rand_points(rng, 1000, denom=64, span=1)
    hull = convex_hull(pts, 2)
    assert certify_hull_2d(pts, hull.vertices)
    # a deliberately wrong vertex set must fail certification
    assert not certify_hull_2d(pts, hull.vertices[1:])
    wrong = set(hull.vertices) | {next(p for p in pts
                                       if p not in hull.vertices)}
    assert not certify_hull_2d(pts, wrong)


def test_unit_square_and_triangle_volumes():
    sq = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
    assert polytope_volume(sq) == 1
    tri = convex_hull([(0, 0), (1, 0), (0, 1)], 2)
    assert polytope_volume(tri) == F(1, 2)


def test_volume_against_monte_carlo():
    rng = random.Random(23)
    pts = rand_points(rng, 50)
    hull = convex_hull(pts, 2)
    vol = float(polytope_volume(hull))
    est, sigma = monte_carlo_volume_2d(hull.vertices, 10**6, seed=99)
    assert abs(vol - est) <= 3 * sigma


def test_minkowski_squares():
    sq = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
    s2 = minkowski_sum(sq, sq)
    assert polytope_volume(s2) == 4
    seg_x = convex_hull([(0, 0), (1, 0)], 2)
    seg_y = convex_hull([(0, 0), (0, 1)], 2)
    assert minkowski_sum(seg_x, seg_y) == sq


def test_minkowski_against_pairwise_oracle():
    rng = random.Random(7)
    for _ in range(5):
        p = convex_hull(rand_points(rng, 12), 2)
        q = convex_hull(rand_points(rng, 12), 2)
        s = minkowski_sum(p, q)
        assert set(s.vertices) == minkowski_by_pairwise_sums(p.vertices,
                                                             q.vertices)


def test_minkowski_dimension_mismatch():
    p = convex_hull([(0, 0)], 2)
    q = convex_hull([(0,)], 1)
    with pytest.raises(ValueError):
        minkowski_sum(p, q)


def test_slice_examples():
    sq = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
    sl = hyperplane_slice(sq, 0, 0)
    assert sl.dim == 1 and polytope_volume(sl) == 1
    assert hyperplane_slice(sq, 0, 2).is_empty


def test_slice_against_lp_envelope():
    rng = random.Random(31)
    for _ in range(8):
        hull = convex_hull(rand_points(rng, 15), 2)
        xs = [v[0] for v in hull.vertices]
        value = (min(xs) + max(xs)) / 2
        sl = hyperplane_slice(hull, 0, value)
        extent = slice_extent_by_lp(hull.vertices, 0, value)
        if sl.is_empty:
            assert extent is None
        else:
            lo, hi = extent
            assert polytope_volume(sl) == hi - lo


@settings(max_examples=60, deadline=None)
@given(st.lists(point2, min_size=1, max_size=12))
def test_hull_idempotent(pts):
    hull = convex_hull(pts, 2)
    assert convex_hull(hull.vertices, 2) == hull


@settings(max_examples=40, deadline=None)
@given(st.lists(point2, min_size=3, max_size=12), st.data())
def test_volume_monotone_under_subset(pts, data):
    big = convex_hull(pts, 2)
    k = data.draw(st.integers(min_value=1, max_value=len(pts)))
    small = convex_hull(pts[:k], 2)
    assert polytope_volume(small) <= polytope_volume(big)


@settings(max_examples=40, deadline=None)
@given(st.lists(point2, min_size=1, max_size=8),
       st.lists(point2, min_size=1, max_size=8))
def test_brunn_minkowski_on_sums(ps, qs):
    p = convex_hull(ps, 2)
    q = convex_hull(qs, 2)
    s = minkowski_sum(p, q)
    vs, vp, vq = polytope_volume(s), polytope_volume(p), polytope_volume(q)
    # vs^(1/2) >= vp^(1/2) + vq^(1/2), squared to stay exact
    lhs = vs - vp - vq
    assert lhs >= 0 and lhs * lhs >= 4 * vp * vq


def test_slice_integral_converges_to_area():
    rng = random.Random(17)
    hull = convex_hull(rand_points(rng, 20), 2)
    area = polytope_volume(hull)
    xs = [v[0] for v in hull.vertices]
    lo, hi = min(xs), max(xs)
    for steps in (64, 256):
        step = F(hi - lo, steps)
        total = sum(
            polytope_volume(sl) if not (sl := hyperplane_slice(
                hull, 0, lo + (k + F(1, 2)) * step)).is_empty else 0
            for k in range(steps))
        total *= step
        # midpoint rule on a concave-boundary region: O(step) accuracy
        assert abs(float(total - area)) < 4 * float(step)


def test_three_dimensional_bodies():
    cube = convex_hull([(x, y, z) for x in (0, 1) for y in (0, 1)
                        for z in (0, 1)], 3)
    assert len(cube.vertices) == 8
    assert polytope_volume(cube) == 1
    sl = hyperplane_slice(cube, 2, F(1, 2))
    assert sl.dim == 2 and polytope_volume(sl) == 1
    tet = convex_hull([(0, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, 2)], 3)
    assert polytope_volume(tet) == F(8, 6)
    flat = convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0)], 3)
    assert polytope_volume(flat) == 0


def test_empty_volume_is_an_error():
    with pytest.raises(ValueError):
        polytope_volume(RationalPolytope(2, ()))


def test_serialization_round_trip():
    hull = convex_hull([(0, 0), (1, 0), (F(1, 3), F(5, 7))], 2)
    assert RationalPolytope.from_json(hull.to_json()) == hull
    assert RationalPolytope.from_csv(hull.to_csv(), 2) == hull


def test_half_spaces_describe_the_body():
    rng = random.Random(2)
    hull = convex_hull(rand_points(rng, 18), 2)
    planes = half_spaces(hull)
    for v in hull.vertices:
        assert all(n[0] * v[0] + n[1] * v[1] <= off for n, off in planes)

import random
from fractions import Fraction as F

import pytest

from arithvol.lattices import (EnumerationBudgetExceeded, kernel_int,
                               kernel_rational, hnf_solve, in_lattice,
                               lattice_points_in_box, reduce_mod_lattice,
                               row_hnf, saturation, coefficient_extractor)
from oracles import box_sections


def test_row_hnf_canonical():
    assert row_hnf([[2, 1], [0, 3]]) == ((2, 1), (0, 3))
    assert row_hnf([[0, 3], [2, 1]]) == ((2, 1), (0, 3))
    assert row_hnf([[-1, 0], [0, -1]]) == ((1, 0), (0, 1))
    assert row_hnf([[2, 4], [1, 2]]) == ((1, 2),)
    # above-pivot reduction
    h = row_hnf([[1, 5], [0, 3]])
    assert h == ((1, 2), (0, 3))


def test_kernel_examples():
    k = kernel_int([[1, 2, 3]], 3)
    assert len(k) == 2
    for row in k:
        assert sum(a * b for a, b in zip(row, [1, 2, 3])) == 0
    assert kernel_int([[1, 0], [0, 1]], 2) == ()
    kr = kernel_rational([[F(1, 2), F(1, 3)]], 2)
    for row in kr:
        assert row[0] * F(1, 2) + row[1] * F(1, 3) == 0


def test_kernel_is_saturated():
    rng = random.Random(4)
    for _ in range(30):
        rows = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(2)]
        ker = kernel_int(rows, 4)
        assert saturation(ker, 4) == ker


def test_saturation():
    assert saturation([[2, 4]], 2) == ((1, 2),)
    assert saturation([[2, 0], [0, 3]], 2) == ((1, 0), (0, 1))
    # already saturated chains stay put
    assert saturation([[1, 1, 0]], 3) == ((1, 1, 0),)


def test_solve_and_reduce():
    h = row_hnf([[2, 1], [0, 3]])
    assert hnf_solve(h, (2, 1)) == (1, 0)
    assert hnf_solve(h, (2, 4)) == (1, 1)
    assert hnf_solve(h, (1, 0)) is None
    assert in_lattice(h, (4, 2))
    r = reduce_mod_lattice(h, (5, 7))
    assert not in_lattice(h, r) or r == (0, 0)
    assert in_lattice(h, tuple(a - b for a, b in zip((5, 7), r)))


def test_enumeration_against_direct_scan():
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 3)
        k = rng.randint(1, n)
        rows = []
        while len(row_hnf(rows, n)) < k:
            rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k)]
        hnf = row_hnf(rows, n)
        bound = rng.randint(0, 6)
        got = lattice_points_in_box(hnf, bound, 10**6, n)
        want = box_sections(hnf, bound, n)
        assert got == want, (hnf, bound)


def test_enumeration_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        lattice_points_in_box([[1, 0], [0, 1]], 10**4, cap=100)


def test_rank_zero_lattice():
    assert lattice_points_in_box((), 5, 100, ncols=3) == [(0, 0, 0)]


def test_coefficient_extractor():
    rows = ((1, 2, 0), (0, 1, 1))
    C = coefficient_extractor(rows)
    # C @ (row combinations) recovers the coefficients
    vec = tuple(3 * a - 2 * b for a, b in zip(rows[0], rows[1]))
    coeffs = tuple(sum(C[i][j] * vec[j] for j in range(3)) for i in range(2))
    assert coeffs == (F(3), F(-2))

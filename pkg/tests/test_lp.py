import random
from fractions import Fraction as F

import pytest

from arithvol.lp import (Infeasible, Unbounded, max_abs_linear_on_section,
                         membership_in_hull, min_max_abs_on_fiber, solve_lp)


def test_box_corner():
    val, x = solve_lp([F(1), F(1)],
                      [[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 1, 1])
    assert val == 2 and x == (F(1), F(1))


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        solve_lp([F(1)], [], [], [[F(0)]], [F(1)])
    with pytest.raises(Unbounded):
        solve_lp([F(1)], [], [])


def test_against_scipy_on_random_boxes():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = random.Random(12)
    for _ in range(25):
        n = rng.randint(1, 4)
        m = rng.randint(n, 6)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        # bounded feasible region: add a box
        for i in range(n):
            row = [0] * n
            row[i] = 1
            A.append(list(row))
            row2 = [0] * n
            row2[i] = -1
            A.append(row2)
        b = [rng.randint(1, 5) for _ in range(m)] + [4] * (2 * n)
        c = [rng.randint(-3, 3) for _ in range(n)]
        val, x = solve_lp([F(v) for v in c],
                          [[F(v) for v in row] for row in A],
                          [F(v) for v in b])
        res = scipy_opt.linprog([-v for v in c], A_ub=A, b_ub=b,
                                bounds=[(None, None)] * n, method="highs")
        assert res.status == 0
        assert abs(float(val) + res.fun) < 1e-7, (val, res.fun)


def test_section_norm_value():
    # span{(1,2)}: |t| <= 1 and |2t| <= 1 force t in [-1/2, 1/2]
    val = max_abs_linear_on_section([F(1), F(0)], [[F(1), F(2)]])
    assert val == F(1, 2)


def test_fiber_min_norm():
    # min max(|x|,|y|) with x + y = 3 is 3/2
    assert min_max_abs_on_fiber([[F(1), F(0)], [F(0), F(1)]],
                                [[F(1), F(1)]], [F(3)]) == F(3, 2)


def test_fiber_min_norm_against_breakpoint_oracle():
    from oracles import quotient_norm_on_plane
    rng = random.Random(3)
    checked = 0
    while checked < 40:
        n = rng.randint(2, 4)
        cols = [[F(rng.randint(-2, 2)) for _ in range(n)] for _ in range(2)]
        functional = [F(rng.randint(-2, 2)) for _ in range(n)]
        f_on_basis = [sum(functional[i] * col[i] for i in range(n))
                      for col in cols]
        if all(v == 0 for v in f_on_basis):
            continue
        # basis columns must be independent for a compact unit ball
        rank2 = any(cols[0][i] * cols[1][j] != cols[0][j] * cols[1][i]
                    for i in range(n) for j in range(n))
        if not rank2:
            continue
        target = F(rng.randint(1, 3))
        exact = min_max_abs_on_fiber(cols, [functional], [target])
        oracle = quotient_norm_on_plane(cols, functional, target)
        assert exact == oracle, (cols, functional, target)
        checked += 1


def test_membership():
    tri = [[0, 0], [1, 0], [0, 1]]
    assert membership_in_hull([F(1, 4), F(1, 4)], tri)
    assert membership_in_hull([F(0), F(0)], tri)
    assert membership_in_hull([F(1, 2), F(1, 2)], tri)
    assert not membership_in_hull([F(1), F(1)], tri)
    assert not membership_in_hull([F(-1, 8), F(0)], tri)

"""Exact rational linear programming (two-phase simplex, Bland's rule).

Small dense problems only; every pivot is carried out over Fractions so the
optimum is an exact rational number.  Used for quotient norms (the infimum of
a max-abs norm over an affine fiber is a linear program) and as an
independent membership oracle in the geometry tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _simplex_phase(T, basis, nrows, obj_row, stop_cols):
    """Run Bland-rule pivots on tableau T until the objective row is optimal."""
    while True:
        pivot_col = None
        for j in range(stop_cols):
            if T[obj_row][j] < 0:
                pivot_col = j
                break
        if pivot_col is None:
            return
        pivot_row = None
        best = None
        for i in range(nrows):
            if T[i][pivot_col] > 0:
                ratio = T[i][-1] / T[i][pivot_col]
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[pivot_row]):
                    best = ratio
                    pivot_row = i
        if pivot_row is None:
            raise Unbounded
        _pivot(T, basis, pivot_row, pivot_col)


def _pivot(T, basis, r, c):
    piv = T[r][c]
    T[r] = [x / piv for x in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            T[i] = [x - f * y for x, y in zip(T[i], T[r])]
    basis[r] = c


def solve_lp(c: Sequence[Fraction], A_ub, b_ub, A_eq=(), b_eq=()):
    """Maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x free.

    Returns (optimum, x) with exact Fractions.  Raises Infeasible/Unbounded.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = []
    rhs = []
    for row, b in zip(A_ub, b_ub):
        rows.append([Fraction(v) for v in row])
        rhs.append(Fraction(b))
    for row, b in zip(A_eq, b_eq):
        r = [Fraction(v) for v in row]
        rows.append(r)
        rhs.append(Fraction(b))
        rows.append([-v for v in r])
        rhs.append(-Fraction(b))
    m = len(rows)
    # Free variables split as x = u - w with u, w >= 0.
    nvar = 2 * n
    # Columns: u(0..n-1), w(n..2n-1), slack(2n..2n+m-1), artificial, rhs.
    need_art = [rhs[i] < 0 for i in range(m)]
    nart = sum(need_art)
    ncols = nvar + m + nart + 1
    T = [[_ZERO] * ncols for _ in range(m + 2)]
    basis = [0] * m
    art_idx = 0
    for i in range(m):
        sign = -1 if need_art[i] else 1
        for j in range(n):
            T[i][j] = sign * rows[i][j]
            T[i][n + j] = -sign * rows[i][j]
        T[i][nvar + i] = Fraction(sign)
        if need_art[i]:
            col = nvar + m + art_idx
            T[i][col] = _ONE
            basis[i] = col
            art_idx += 1
        else:
            basis[i] = nvar + i
        T[i][-1] = sign * rhs[i]
    obj = m  # phase-2 objective row
    pobj = m + 1  # phase-1 objective row
    for j in range(n):
        T[obj][j] = -c[j]
        T[obj][n + j] = c[j]
    if nart:
        for i in range(m):
            if need_art[i]:
                for j in range(ncols):
                    T[pobj][j] -= T[i][j]
        for k in range(nart):
            T[pobj][nvar + m + k] = _ZERO
        _simplex_phase(T, basis, m, pobj, nvar + m)
        if T[pobj][-1] < 0:
            raise Infeasible
        # Drive any lingering artificial variables out of the basis.
        for i in range(m):
            if basis[i] >= nvar + m:
                col = next((j for j in range(nvar + m) if T[i][j] != 0), None)
                if col is not None:
                    _pivot(T, basis, i, col)
    _simplex_phase(T, basis, m, obj, nvar + m)
    x = [_ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] += T[i][-1]
        elif basis[i] < nvar:
            x[basis[i] - n] -= T[i][-1]
    return T[obj][-1], tuple(x)


def max_abs_linear_on_section(functional: Sequence[Fraction],
                              basis_cols: Sequence[Sequence[Fraction]]) -> Fraction:
    """max f(x) over x in the column span with max-abs coordinate <= 1.

    The span is given by basis columns in the ambient coordinate space; the
    polytope is compact whenever the columns are independent.
    """
    k = len(basis_cols)
    n = len(basis_cols[0])
    # Variables: span coefficients t; constraints |(B t)_i| <= 1.
    c = [sum(Fraction(functional[i]) * Fraction(basis_cols[j][i])
             for i in range(n)) for j in range(k)]
    A_ub = []
    b_ub = []
    for i in range(n):
        row = [Fraction(basis_cols[j][i]) for j in range(k)]
        A_ub.append(row)
        b_ub.append(_ONE)
        A_ub.append([-v for v in row])
        b_ub.append(_ONE)
    val, _ = solve_lp(c, A_ub, b_ub)
    return val


def min_max_abs_on_fiber(basis_cols: Sequence[Sequence[Fraction]],
                         map_rows: Sequence[Sequence[Fraction]],
                         target: Sequence[Fraction]) -> Fraction:
    """min of max_i |(B t)_i| over coefficients t with M (B t) = target.

    Infeasible fibers raise Infeasible.  This is the exact quotient norm of
    ``target`` for the max-abs norm restricted to the span of B.
    """
    k = len(basis_cols)
    n = len(basis_cols[0])
    # Variables: (t_1..t_k, s); minimize s subject to -s <= (Bt)_i <= s,
    # (M B) t = target.  Maximize -s with the generic solver.
    c = [_ZERO] * k + [Fraction(-1)]
    A_ub = []
    b_ub = []
    for i in range(n):
        row = [Fraction(basis_cols[j][i]) for j in range(k)]
        A_ub.append(row + [Fraction(-1)])
        b_ub.append(_ZERO)
        A_ub.append([-v for v in row] + [Fraction(-1)])
        b_ub.append(_ZERO)
    A_eq = []
    b_eq = []
    for row, t in zip(map_rows, target):
        comp = [sum(Fraction(row[i]) * Fraction(basis_cols[j][i])
                    for i in range(n)) for j in range(k)]
        A_eq.append(comp + [_ZERO])
        b_eq.append(Fraction(t))
    val, _ = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    return -val


def membership_in_hull(point: Sequence[Fraction],
                       points: Sequence[Sequence[Fraction]]) -> bool:
    """Exact test: is ``point`` a convex combination of ``points``?

    Dedicated phase-1 simplex in standard form (nonnegative weights, d+1
    equality rows); the tableau stays (d+1) x (n + d + 2) however many
    points there are.
    """
    if not points:
        return False
    d = len(point)
    n = len(points)
    rows = []
    rhs = []
    for i in range(d):
        rows.append([Fraction(p[i]) for p in points])
        rhs.append(Fraction(point[i]))
    rows.append([_ONE] * n)
    rhs.append(_ONE)
    m = d + 1
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    # Columns: weights, artificials, rhs.  Minimize the artificial sum.
    T = [rows[i] + [_ONE if j == i else _ZERO for j in range(m)] + [rhs[i]]
         for i in range(m)]
    obj = [_ZERO] * (n + m + 1)
    for i in range(m):
        obj = [o - t for o, t in zip(obj, T[i])]
    for j in range(m):
        obj[n + j] = _ZERO
    T.append(obj)
    basis = [n + i for i in range(m)]
    _simplex_phase(T, basis, m, m, n)
    return T[m][-1] == 0

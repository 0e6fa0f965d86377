"""Integer lattice utilities: Hermite forms, kernels, saturation, enumeration.

Lattices are handled as tuples of basis *rows* internally; the public space
types expose column bases, matching the usual "columns span the lattice"
convention, and convert at the boundary.  All arithmetic is exact (Python
ints / Fractions); numpy is used only to scan enumeration boxes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

IntMatrix = tuple[tuple[int, ...], ...]


class EnumerationBudgetExceeded(RuntimeError):
    """The candidate box is larger than the configured cap.

    Raised instead of ever returning a truncated (wrong) count.
    """


def as_int_matrix(rows: Iterable[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def transpose(mat) -> tuple[tuple, ...]:
    return tuple(zip(*mat)) if mat else ()


def mat_vec(mat, vec):
    return tuple(sum(a * b for a, b in zip(row, vec)) for row in mat)


def row_hnf(mat: Iterable[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    """Row Hermite normal form, zero rows dropped.

    Pivots are positive, strictly right-moving, and entries above each pivot
    are reduced into [0, pivot).  The result is the canonical basis of the
    row span as a sublattice of Z^n.
    """
    M = [list(map(int, row)) for row in mat]
    if not M:
        return ()
    cols = ncols if ncols is not None else len(M[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, len(M)):
            while M[i][c] != 0:
                q = M[r][c] // M[i][c]
                M[r] = [a - q * b for a, b in zip(M[r], M[i])]
                M[r], M[i] = M[i], M[r]
        if M[r][c] < 0:
            M[r] = [-a for a in M[r]]
        for i in range(r):
            q = M[i][c] // M[r][c]
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return as_int_matrix(row for row in M[:r] if any(row))


def pivot_columns(hnf: IntMatrix) -> tuple[int, ...]:
    return tuple(next(c for c, x in enumerate(row) if x != 0) for row in hnf)


def kernel_int(mat: Iterable[Sequence[int]], ncols: int) -> IntMatrix:
    """Canonical basis of {x in Z^ncols : mat @ x = 0}.

    The result spans the full rational kernel intersected with Z^ncols, so it
    is automatically saturated.
    """
    rows = [list(map(int, row)) for row in mat]
    # Row-reduce the transpose augmented with an identity; rows whose matrix
    # part vanishes carry kernel vectors in the identity part.
    m = len(rows)
    aug = [[rows[i][j] for i in range(m)] + [int(i == j) for i in range(ncols)]
           for j in range(ncols)]
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, ncols) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(r + 1, ncols):
            while aug[i][c] != 0:
                q = aug[r][c] // aug[i][c]
                aug[r] = [a - q * b for a, b in zip(aug[r], aug[i])]
                aug[r], aug[i] = aug[i], aug[r]
        r += 1
        if r == ncols:
            break
    kernel_rows = [row[m:] for row in aug[r:]]
    return row_hnf(kernel_rows, ncols)


def kernel_rational(mat: Iterable[Sequence[Fraction]], ncols: int) -> IntMatrix:
    """Integer kernel of a rational matrix (rows cleared of denominators)."""
    cleared = []
    for row in mat:
        fr = [Fraction(x) for x in row]
        lcm = 1
        for x in fr:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        cleared.append([int(x * lcm) for x in fr])
    return kernel_int(cleared, ncols)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def saturation(basis_rows: Iterable[Sequence[int]], ncols: int) -> IntMatrix:
    """Canonical basis of (Q-span of the rows) intersected with Z^ncols."""
    rows = as_int_matrix(basis_rows)
    if not rows:
        return ()
    perp = kernel_int(rows, ncols)
    if not perp:
        return row_hnf(((1 if i == j else 0) for j in range(ncols))
                       for i in range(ncols))
    return kernel_int(perp, ncols)


def hnf_solve(hnf: IntMatrix, vec: Sequence[int]):
    """Coefficients of vec over the HNF basis rows, or None if not in the lattice."""
    v = list(map(int, vec))
    pivots = pivot_columns(hnf)
    coeffs = []
    for row, c in zip(hnf, pivots):
        if v[c] % row[c] != 0:
            return None
        q = v[c] // row[c]
        coeffs.append(q)
        v = [a - q * b for a, b in zip(v, row)]
    return tuple(coeffs) if not any(v) else None


def in_lattice(hnf: IntMatrix, vec: Sequence[int]) -> bool:
    return hnf_solve(hnf, vec) is not None


def reduce_mod_lattice(hnf: IntMatrix, vec: Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of vec modulo the HNF lattice."""
    v = list(map(int, vec))
    pivots = pivot_columns(hnf)
    for row, c in zip(hnf, pivots):
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


# ---------------------------------------------------------------------------
# Rational linear algebra (small systems only)
# ---------------------------------------------------------------------------


def rational_solve(mat, rhs):
    """Solve mat @ x = rhs over Q; None if inconsistent, any solution if under-determined."""
    A = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(mat, rhs)]
    nrows = len(A)
    ncols = len(mat[0]) if nrows else 0
    piv_of_col: dict[int, int] = {}
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        A[r] = [x / A[r][c] for x in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_of_col[c] = r
        r += 1
    for i in range(r, nrows):
        if A[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for c, i in piv_of_col.items():
        x[c] = A[i][ncols]
    return tuple(x)


def coefficient_extractor(basis_rows: IntMatrix) -> tuple[tuple[Fraction, ...], ...]:
    """Rational matrix C with C @ x = coefficients of x over the basis rows.

    Valid on the rational span of the rows (left inverse of the transpose).
    """
    k = len(basis_rows)
    gram = [[sum(a * b for a, b in zip(basis_rows[i], basis_rows[j]))
             for j in range(k)] for i in range(k)]
    rows = []
    for i in range(k):
        rhs = [Fraction(1) if j == i else Fraction(0) for j in range(k)]
        col = rational_solve(gram, rhs)
        if col is None:
            raise ValueError("basis rows are linearly dependent")
        rows.append(col)
    # C = gram^{-1} @ B
    n = len(basis_rows[0])
    return tuple(
        tuple(sum(rows[i][j] * basis_rows[j][c] for j in range(k)) for c in range(n))
        for i in range(k)
    )


# ---------------------------------------------------------------------------
# Box enumeration
# ---------------------------------------------------------------------------

_CHUNK = 1 << 18


def _coefficient_bounds(hnf: IntMatrix, bound: int) -> list[int]:
    pivots = pivot_columns(hnf)
    bounds: list[int] = []
    for j, (row, c) in enumerate(zip(hnf, pivots)):
        slack = bound + sum(abs(hnf[i][c]) * bounds[i] for i in range(j))
        bounds.append(slack // row[c])
    return bounds


def lattice_points_in_box(basis_rows: Iterable[Sequence[int]], bound: int,
                          cap: int, ncols: int | None = None) -> list[tuple[int, ...]]:
    """All lattice vectors with max-abs coordinate <= bound, lex-sorted.

    ``cap`` limits the number of *candidates examined*; exceeding it raises
    EnumerationBudgetExceeded.
    """
    bound = int(bound)
    rows = as_int_matrix(basis_rows)
    if bound < 0:
        return []
    if not rows:
        if ncols is None:
            raise ValueError("rank-0 lattice needs an explicit ambient dimension")
        return [tuple([0] * ncols)]
    hnf = row_hnf(rows)
    if len(hnf) < len(rows):
        raise ValueError("basis rows are linearly dependent")
    n = len(hnf[0])
    cbounds = _coefficient_bounds(hnf, bound)
    total = 1
    for b in cbounds:
        total *= 2 * b + 1
        if total > cap:
            raise EnumerationBudgetExceeded(
                f"candidate box of size {total}+ exceeds cap {cap}")
    # Overflow safety for the int64 fast path.
    maxcoord = max(sum(abs(hnf[i][c]) * cbounds[i] for i in range(len(hnf)))
                   for c in range(n))
    dtype = np.int64 if maxcoord < (1 << 62) else object
    H = np.array(hnf, dtype=dtype)
    ranges = [np.arange(-b, b + 1, dtype=dtype) for b in cbounds]
    k = len(cbounds)
    grids = np.meshgrid(*ranges, indexing="ij")
    X = np.stack([g.reshape(-1) for g in grids], axis=1)
    out: list[tuple[int, ...]] = []
    for start in range(0, X.shape[0], _CHUNK):
        chunk = X[start:start + _CHUNK]
        pts = chunk @ H
        mask = np.all(np.abs(pts) <= bound, axis=1)
        good = pts[mask]
        out.extend(tuple(int(v) for v in row) for row in good)
    out.sort()
    return out


def count_lattice_points_in_box(basis_rows, bound: int, cap: int,
                                ncols: int | None = None) -> int:
    return len(lattice_points_in_box(basis_rows, bound, cap, ncols))

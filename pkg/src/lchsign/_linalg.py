"""Small exact linear algebra over the rationals, used by the oracles."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_matrix(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def columns_to_matrix(cols: Sequence[Sequence[int | Fraction]], nrows: int) -> Matrix:
    return [[Fraction(c[i]) for c in cols] for i in range(nrows)]


def _echelon(m: Matrix) -> tuple[Matrix, int, int]:
    """Row-reduce a copy of m (int or Fraction entries). Returns (matrix, rank, sign of the row operations)."""
    m = [row[:] for row in m]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    sign = 1
    for c in range(ncols):
        pivot = next((r for r in range(rank, nrows) if m[r][c]), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
            sign = -sign
        pr = m[rank]
        for r in range(rank + 1, nrows):
            f = m[r][c]
            if f:
                # entries may be ints; promote so the division stays exact
                f = Fraction(f) / pr[c]
                m[r] = [a - f * b for a, b in zip(m[r], pr)]
        rank += 1
        if rank == nrows:
            break
    return m, rank, sign


def det_sign(m: Matrix) -> int:
    """Sign of the determinant of a square matrix (0 if singular)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("det_sign needs a square matrix")
    red, rank, sign = _echelon(m)
    if rank < n:
        return 0
    for i in range(n):
        if red[i][i] < 0:
            sign = -sign
    return sign


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return _echelon(m)[1]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    ncols = len(b[0]) if b else 0
    return [[sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(ncols)]
            for row in a]


def is_zero(m: Matrix) -> bool:
    return all(x == 0 for row in m for x in row)


def column(m: Matrix, j: int) -> list[Fraction]:
    return [row[j] for row in m]


def solve(a: Matrix, b: Sequence[Fraction]) -> list[Fraction]:
    """Return one solution x of a x = b; raises ValueError if none exists."""
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    aug = [a[i][:] + [Fraction(b[i])] for i in range(nrows)]
    red, _, _ = _echelon(aug)
    x = [Fraction(0)] * ncols
    for row in reversed(red):
        lead = next((j for j in range(ncols) if row[j] != 0), None)
        if lead is None:
            if row[ncols] != 0:
                raise ValueError("inconsistent linear system")
            continue
        rest = sum((row[j] * x[j] for j in range(lead + 1, ncols)), Fraction(0))
        x[lead] = (row[ncols] - rest) / row[lead]
    return x


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    cols = [solve(m, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
    return columns_to_matrix(cols, n)

"""Integer lattice utilities: row Hermite forms, kernels and solving.

Lattices live in Z^k and are given by generating row vectors. The Hermite
basis is upper triangular with positive pivots, and entries above a pivot are
reduced into [0, pivot). For a full-rank lattice this gives canonical coset
representatives of Z^k / L.
"""
from __future__ import annotations

from typing import Sequence

Vector = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = a*x + b*y = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _combine(rows: list[list[int]], r: int, i: int, col: int) -> None:
    a, b = rows[r][col], rows[i][col]
    g, x, y = xgcd(a, b)
    ag, bg = a // g, b // g
    ra, rb = rows[r], rows[i]
    rows[r] = [x * u + y * v for u, v in zip(ra, rb)]
    rows[i] = [ag * v - bg * u for u, v in zip(ra, rb)]


def echelon(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Unimodular row reduction on the first ``ncols`` columns.

    Rows may be longer than ``ncols``; trailing entries are carried along,
    which is how kernels and transforms are recovered. Returns all rows, with
    the pivot rows first (in column order) and the remaining rows zero on the
    first ``ncols`` columns.
    """
    work = [list(r) for r in rows]
    r = 0
    for col in range(ncols):
        if r >= len(work):
            break
        for i in range(r + 1, len(work)):
            if work[i][col]:
                if work[r][col] == 0:
                    work[r], work[i] = work[i], work[r]
                else:
                    _combine(work, r, i, col)
        if work[r][col] == 0:
            continue
        if work[r][col] < 0:
            work[r] = [-v for v in work[r]]
        p = work[r][col]
        for i in range(r):
            f = work[i][col] // p
            if f:
                work[i] = [u - f * v for u, v in zip(work[i], work[r])]
        r += 1
    return work


def hnf(rows: Sequence[Sequence[int]], k: int) -> list[Vector]:
    """Hermite basis (nonzero rows only) of the lattice spanned by ``rows``."""
    work = echelon(rows, k)
    out = [tuple(row[:k]) for row in work if any(row[:k])]
    return out


def is_full_rank_triangular(basis: Sequence[Vector], k: int) -> bool:
    return len(basis) == k and all(basis[i][i] > 0 for i in range(k))


def reduce_vector(v: Sequence[int], basis: Sequence[Vector]) -> Vector:
    """Canonical representative of v modulo a full-rank Hermite basis."""
    w = list(v)
    for i, row in enumerate(basis):
        f = w[i] // row[i]
        if f:
            for j in range(i, len(w)):
                w[j] -= f * row[j]
    return tuple(w)


def integer_row_kernel(matrix: Sequence[Sequence[int]]) -> list[Vector]:
    """Basis of {x in Z^m : x * matrix = 0}, matrix given as m rows."""
    m = len(matrix)
    if m == 0:
        return []
    n = len(matrix[0])
    aug = [list(row) + [1 if j == i else 0 for j in range(m)] for i, row in enumerate(matrix)]
    work = echelon(aug, n)
    return [tuple(row[n:]) for row in work if not any(row[:n])]


def solve_combination(vectors: Sequence[Sequence[int]], target: Sequence[int]) -> Vector | None:
    """Integer coefficients c with sum c_i vectors_i = target, or None."""
    m = len(vectors)
    k = len(target)
    aug = [list(v) + [1 if j == i else 0 for j in range(m)] for i, v in enumerate(vectors)]
    work = echelon(aug, k)
    rem = list(target)
    coeffs = [0] * m
    for row in work:
        lead = next((c for c in range(k) if row[c]), None)
        if lead is None:
            break
        if rem[lead] % row[lead]:
            return None
        f = rem[lead] // row[lead]
        if f:
            rem = [a - f * b for a, b in zip(rem, row[:k])]
            coeffs = [a + f * b for a, b in zip(coeffs, row[k:])]
    if any(rem):
        return None
    return tuple(coeffs)


def mat_vec(M: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def transpose(M: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*M)]


def preimage(M: Sequence[Sequence[int]], basis: Sequence[Vector], k: int) -> list[Vector]:
    """Hermite basis of {b : M b in L}, where L is spanned by ``basis``."""
    rows = [list(r) for r in transpose(M)] + [[-x for x in b] for b in basis]
    kernel = integer_row_kernel(rows)
    return hnf([v[:k] for v in kernel], k)


def det(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    a = [list(r) for r in M]
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if a[r][c]), None)
            if swap is None:
                return 0
            a[c], a[swap] = a[swap], a[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                a[r][j] = (a[r][j] * a[c][c] - a[r][c] * a[c][j]) // prev
        prev = a[c][c]
    return sign * a[n - 1][n - 1]

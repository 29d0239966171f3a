"""Exact integer and rational linear algebra on small dense matrices.

Matrices are lists of rows.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple[int, ...]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vgcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide by the gcd of the coordinates (zero vector unchanged)."""
    g = vgcd(v)
    return tuple(v) if g in (0, 1) else tuple(x // g for x in v)


def leq(u: Sequence[int], v: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(u, v))


def _integer_echelon(rows: list[list[int]], ncols: int, reduce_above: bool) -> int:
    """In-place unimodular row reduction of the first ``ncols`` columns.

    Returns the rank.  Pivots end up positive; with ``reduce_above`` the
    entries above each pivot are brought into ``[0, pivot)``, which gives
    the Hermite normal form.
    """
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if rows[i][c] != 0]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[k] = rows[k], rows[r]
            piv = rows[r][c]
            done = True
            for i in range(r + 1, nrows):
                if rows[i][c]:
                    f = rows[i][c] // piv
                    if f:
                        rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][c]:
                        done = False
            if done:
                break
        if rows[r][c] == 0:
            continue
        if rows[r][c] < 0:
            rows[r] = [-a for a in rows[r]]
        if reduce_above:
            piv = rows[r][c]
            for i in range(r):
                f = rows[i][c] // piv
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def hermite_rows(vectors: Sequence[Sequence[int]]) -> list[Vector]:
    """Row Hermite normal form of the lattice spanned by ``vectors``.

    The result is unique for the lattice, so it serves as a canonical basis.
    """
    rows = [list(v) for v in vectors]
    if not rows:
        return []
    rank = _integer_echelon(rows, len(rows[0]), reduce_above=True)
    return [tuple(row) for row in rows[:rank]]


def integer_left_kernel(matrix: Sequence[Sequence[int]], nrows: int) -> list[Vector]:
    """ℤ-basis of ``{f in ℤ^nrows : f^T M = 0}`` in Hermite normal form.

    ``matrix`` has ``nrows`` rows (possibly with zero columns).
    """
    ncols = len(matrix[0]) if nrows and matrix else 0
    rows = [list(matrix[i]) + [int(i == j) for j in range(nrows)] for i in range(nrows)]
    rank = _integer_echelon(rows, ncols, reduce_above=False)
    kernel = [row[ncols:] for row in rows[rank:]]
    return hermite_rows(kernel)


def rational_rref(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """Reduced row echelon form in place over ℚ; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        piv = rows[r][c]
        rows[r] = [a / piv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_rational(columns: Sequence[Sequence[int]], target: Sequence[int]) -> list[Fraction] | None:
    """Some ``x`` with ``sum(x_i * columns[i]) == target``, or None.

    Free variables are set to zero, so for linearly independent columns the
    solution is the unique one.
    """
    n = len(columns)
    m = len(target)
    rows = [[Fraction(columns[i][r]) for i in range(n)] + [Fraction(target[r])] for r in range(m)]
    pivots = rational_rref(rows, n)
    for row in rows[len(pivots):]:
        if row[n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n]
    return x


def rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(a) for a in v] for v in vectors]
    if not rows:
        return 0
    return len(rational_rref(rows, len(rows[0])))

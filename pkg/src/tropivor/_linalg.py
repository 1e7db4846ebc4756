"""Small exact linear algebra over Fractions (Gaussian elimination)."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Unique solution of the square or overdetermined system a x = b, else None."""
    if not a:
        return None
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, piv = rref(aug)
    if n in piv or len(piv) < n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(m, piv):
        x[c] = row[n]
    return x

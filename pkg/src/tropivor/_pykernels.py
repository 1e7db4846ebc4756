"""Pure-Python versions of the hot kernels.

All kernels work on integer data.  Bound matrices are flat row-major lists
of length n*n whose entries are Python ints, with ``INF`` standing for an
absent (+infinity) bound.  Callers scale rationals to a common denominator
before calling in.
"""
from __future__ import annotations

INF = 1 << 62


def close(m: list, n: int) -> bool:
    """All-pairs shortest-path closure in place; False iff a negative cycle."""
    for k in range(n):
        rk = k * n
        for i in range(n):
            ri = i * n
            mik = m[ri + k]
            if mik >= INF:
                continue
            for j in range(n):
                mkj = m[rk + j]
                if mkj >= INF:
                    continue
                s = mik + mkj
                if s < m[ri + j]:
                    m[ri + j] = s
        if m[rk + k] < 0:
            return False
    for i in range(n):
        if m[i * n + i] < 0:
            return False
    return True


def full_dimensional(m: list, n: int) -> bool:
    for i in range(n):
        for j in range(i + 1, n):
            a = m[i * n + j]
            b = m[j * n + i]
            if a < INF and b < INF and a + b <= 0:
                return False
    return True


def cone_index(m: list, n: int, b: list) -> int:
    """Facet index p*n+q with the polytrope inside b + cone(Facet(p,q)), else -1.

    The cone is {x : (x-b)_p >= (x-b)_j >= (x-b)_q for all j}.
    """
    for p in range(n):
        ok = True
        for j in range(n):
            if j != p and m[j * n + p] > b[j] - b[p]:
                ok = False
                break
        if not ok:
            continue
        for q in range(n):
            if q == p:
                continue
            good = True
            for j in range(n):
                if j != q and m[q * n + j] > b[q] - b[j]:
                    good = False
                    break
            if good:
                return p * n + q
    return -1


def split(m: list, n: int, b: list) -> list:
    """Full-dimensional pieces of the polytrope cut by the cones of b + F(B^d).

    Returns a list of (p, q, child) with child a closed flat bound matrix.
    """
    out = []
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            c = list(m)
            for j in range(n):
                if j != p:
                    v = b[j] - b[p]
                    if v < c[j * n + p]:
                        c[j * n + p] = v
                if j != q:
                    v = b[q] - b[j]
                    if v < c[q * n + j]:
                        c[q * n + j] = v
            if close(c, n) and full_dimensional(c, n):
                out.append((p, q, c))
    return out


def trop_dist(a, b) -> int:
    hi = lo = a[0] - b[0]
    for i in range(1, len(a)):
        t = a[i] - b[i]
        if t > hi:
            hi = t
        elif t < lo:
            lo = t
    return hi - lo


def nearest(x, sites) -> tuple:
    best = None
    idx = []
    for k, s in enumerate(sites):
        dv = trop_dist(x, s)
        if best is None or dv < best:
            best = dv
            idx = [k]
        elif dv == best:
            idx.append(k)
    return best, idx

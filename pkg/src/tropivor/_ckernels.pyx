# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in _pykernels (same contracts)."""

cdef enum:
    MAXN = 16

cdef long long CINF = 1LL << 62
INF = 1 << 62


cdef inline void _load(list m, int n, long long* c):
    cdef int i
    for i in range(n * n):
        c[i] = m[i]


cdef bint _close(long long* c, int n) nogil:
    cdef int i, j, k
    cdef long long cik, ckj, s
    for k in range(n):
        for i in range(n):
            cik = c[i * n + k]
            if cik >= CINF:
                continue
            for j in range(n):
                ckj = c[k * n + j]
                if ckj >= CINF:
                    continue
                s = cik + ckj
                if s < c[i * n + j]:
                    c[i * n + j] = s
        if c[k * n + k] < 0:
            return False
    for i in range(n):
        if c[i * n + i] < 0:
            return False
    return True


cdef bint _full(long long* c, int n) nogil:
    cdef int i, j
    cdef long long a, b
    for i in range(n):
        for j in range(i + 1, n):
            a = c[i * n + j]
            b = c[j * n + i]
            if a < CINF and b < CINF and a + b <= 0:
                return False
    return True


def close(list m, int n):
    cdef long long c[MAXN * MAXN]
    cdef int i
    _load(m, n, c)
    ok = _close(c, n)
    for i in range(n * n):
        m[i] = c[i]
    return ok


def full_dimensional(list m, int n):
    cdef long long c[MAXN * MAXN]
    _load(m, n, c)
    return _full(c, n)


def cone_index(list m, int n, list b):
    cdef long long c[MAXN * MAXN]
    cdef long long bb[MAXN]
    cdef int p, q, j
    cdef bint ok
    _load(m, n, c)
    for j in range(n):
        bb[j] = b[j]
    for p in range(n):
        ok = True
        for j in range(n):
            if j != p and c[j * n + p] > bb[j] - bb[p]:
                ok = False
                break
        if not ok:
            continue
        for q in range(n):
            if q == p:
                continue
            ok = True
            for j in range(n):
                if j != q and c[q * n + j] > bb[q] - bb[j]:
                    ok = False
                    break
            if ok:
                return p * n + q
    return -1


def split(list m, int n, list b):
    cdef long long c[MAXN * MAXN]
    cdef long long w[MAXN * MAXN]
    cdef long long bb[MAXN]
    cdef long long v
    cdef int p, q, j, i
    _load(m, n, c)
    for j in range(n):
        bb[j] = b[j]
    out = []
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            for i in range(n * n):
                w[i] = c[i]
            for j in range(n):
                if j != p:
                    v = bb[j] - bb[p]
                    if v < w[j * n + p]:
                        w[j * n + p] = v
                if j != q:
                    v = bb[q] - bb[j]
                    if v < w[q * n + j]:
                        w[q * n + j] = v
            if _close(w, n) and _full(w, n):
                out.append((p, q, [w[i] for i in range(n * n)]))
    return out


def trop_dist(a, b):
    cdef Py_ssize_t i, k = len(a)
    hi = lo = a[0] - b[0]
    for i in range(1, k):
        t = a[i] - b[i]
        if t > hi:
            hi = t
        elif t < lo:
            lo = t
    return hi - lo


def nearest(x, sites):
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

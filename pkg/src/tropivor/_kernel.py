"""Kernel backend selection.

The compiled extension is used when it was built and ``TROPIVOR_PURE`` is
not set to 1.  The compiled path uses 64-bit integers, so inputs whose
magnitude could overflow are routed to the pure-Python kernels, which use
arbitrary-precision ints.
"""
from __future__ import annotations

import os

from . import _pykernels as py

INF = py.INF
_LIMIT = 1 << 59

try:
    if os.environ.get("TROPIVOR_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _ckernels as _c
    BACKEND = "cython"
except ImportError:
    _c = None
    BACKEND = "python"


def _fits(m, b=()) -> bool:
    for v in m:
        if v != INF and not -_LIMIT < v < _LIMIT:
            return False
    for v in b:
        if not -_LIMIT < v < _LIMIT:
            return False
    return True


def close(m: list, n: int) -> bool:
    if _c is not None and n <= 16 and _fits(m):
        return _c.close(m, n)
    return py.close(m, n)


def full_dimensional(m: list, n: int) -> bool:
    return py.full_dimensional(m, n)


def cone_index(m: list, n: int, b: list) -> int:
    if _c is not None and n <= 16 and _fits(m, b):
        return _c.cone_index(m, n, b)
    return py.cone_index(m, n, b)


def split(m: list, n: int, b: list) -> list:
    if _c is not None and n <= 16 and _fits(m, b):
        return _c.split(m, n, b)
    return py.split(m, n, b)


def trop_dist(a, b):
    return (_c or py).trop_dist(a, b)


def nearest(x, sites):
    return (_c or py).nearest(x, sites)

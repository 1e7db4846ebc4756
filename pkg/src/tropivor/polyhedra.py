"""Exact H-polyhedra in the torus chart, polytropes and semi-polytropes.

Every constraint has a coefficient vector over coordinates 1..d+1 summing to
zero, so it is well defined on the torus.  Internally the chart x_1 = 0 is
used, leaving d free variables.  Linear programs are solved by
Fourier-Motzkin elimination with exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Optional, Sequence

from . import _kernel, _linalg
from .errors import DimensionMismatch, GuardExceeded, PreconditionError
from .serialize import rat_str
from .trop_core import TorusPoint, as_rational

LE = "<="
EQ = "="

# ---------------------------------------------------------------- constraints


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # over coordinates 1..d+1, summing to zero
    rhs: Fraction
    rel: str = LE

    def value(self, x) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def holds(self, x) -> bool:
        v = self.value(x)
        return v == self.rhs if self.rel == EQ else v <= self.rhs

    def slack(self, x) -> Fraction:
        return self.rhs - self.value(x)

    def to_json(self) -> dict:
        return {"coeffs": [rat_str(c) for c in self.coeffs], "rel": self.rel, "rhs": rat_str(self.rhs)}


def diff_coeffs(d: int, terms: dict) -> tuple:
    c = [Fraction(0)] * (d + 1)
    for i, w in terms.items():
        c[i - 1] += w
    return tuple(c)


def le(coeffs: Sequence, rhs) -> Constraint:
    return Constraint(tuple(as_rational(c) for c in coeffs), as_rational(rhs), LE)


def eq(coeffs: Sequence, rhs) -> Constraint:
    return Constraint(tuple(as_rational(c) for c in coeffs), as_rational(rhs), EQ)


def difference(d: int, i: int, j: int, rhs, rel: str = LE) -> Constraint:
    """x_i - x_j (rel) rhs with 1-based indices."""
    return Constraint(diff_coeffs(d, {i: 1, j: -1}), as_rational(rhs), rel)


class HPolyhedron:
    """Finite intersection of closed halfspaces and hyperplanes of the torus."""

    __slots__ = ("dim", "constraints")

    def __init__(self, dim: int, constraints: Iterable[Constraint] = ()):
        cons = tuple(constraints)
        for c in cons:
            if len(c.coeffs) != dim + 1:
                raise DimensionMismatch("constraint length does not match dimension", c)
            if sum(c.coeffs) != 0:
                raise PreconditionError("coefficients must sum to zero", c)
        self.dim = dim
        self.constraints = cons

    def __repr__(self) -> str:
        return f"HPolyhedron(d={self.dim}, {len(self.constraints)} constraints)"

    @property
    def equalities(self) -> list[Constraint]:
        return [c for c in self.constraints if c.rel == EQ]

    @property
    def inequalities(self) -> list[Constraint]:
        return [c for c in self.constraints if c.rel == LE]

    def contains(self, x) -> bool:
        coords = x.coords if isinstance(x, TorusPoint) else x
        return all(c.holds(coords) for c in self.constraints)

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DimensionMismatch("dimension mismatch", self, other)
        return HPolyhedron(self.dim, self.constraints + other.constraints)

    def add(self, *cons: Constraint) -> "HPolyhedron":
        return HPolyhedron(self.dim, self.constraints + tuple(cons))

    def to_json(self) -> dict:
        return {"dimension": self.dim, "constraints": [c.to_json() for c in self.constraints]}


# ---------------------------------------------------------------- Fourier-Motzkin


def _scale_row(a: tuple, b: Fraction, k: int):
    s = abs(a[k])
    return tuple(x / s for x in a), b / s


def _prune(rows):
    """Drop duplicates (keeping the tightest) and trivial rows; None if 0 <= negative."""
    best: dict = {}
    for a, b in rows:
        k = next((i for i, x in enumerate(a) if x), None)
        if k is None:
            if b < 0:
                return None
            continue
        a, b = _scale_row(a, b, k)
        old = best.get(a)
        if old is None or b < old:
            best[a] = b
    return list(best.items())


def _eliminate(rows, k):
    pos, neg, out = [], [], []
    for a, b in rows:
        if a[k] > 0:
            pos.append(_scale_row(a, b, k))
        elif a[k] < 0:
            neg.append(_scale_row(a, b, k))
        else:
            out.append((a, b))
    for ap, bp in pos:
        for an, bn in neg:
            out.append((tuple(x + y for x, y in zip(ap, an)), bp + bn))
    return _prune(out)


def _bounds(rows, k, x):
    lo = hi = None
    for a, b in rows:
        ak = a[k]
        if not ak:
            continue
        r = b - sum((a[j] * x[j] for j in range(k) if a[j]), Fraction(0))
        v = r / ak
        if ak > 0:
            hi = v if hi is None or v < hi else hi
        else:
            lo = v if lo is None or v > lo else lo
    return lo, hi


def _pick(lo, hi):
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _fm_solve(rows, n, maximize_first=False):
    """Solve a.x <= b over n variables.

    Returns None if infeasible, else (x, sup of x_0 or None if unbounded).
    With ``maximize_first`` the witness takes x_0 at its supremum when finite.
    """
    rows = _prune(rows)
    if rows is None:
        return None
    stages = [None] * (n + 1)
    stages[n] = rows
    for k in range(n - 1, -1, -1):
        rows = _eliminate(rows, k)
        if rows is None:
            return None
        stages[k] = rows
    x = [Fraction(0)] * n
    sup = None
    for k in range(n):
        lo, hi = _bounds(stages[k + 1], k, x)
        if k == 0:
            sup = hi
            if maximize_first and hi is not None:
                x[0] = hi
                continue
        x[k] = _pick(lo, hi)
    return x, sup


def _lp(eqs, ineqs, n, target=None):
    """Exact LP over n chart variables.

    eqs/ineqs are lists of (coeff tuple of length n, rhs).  If ``target`` is
    a variable index, it is maximized.  Returns None if infeasible, else
    (x, sup) where sup is the supremum of the target (None if unbounded or
    no target).
    """
    order = list(range(n))
    if target is not None:
        order.remove(target)
        order.append(target)
    # Gaussian elimination on equalities, target column last so it stays free
    # whenever possible.
    aug = [[a[j] for j in order] + [b] for a, b in eqs]
    piv_rows: list = []
    if aug:
        m, pivots = _linalg.rref(aug)
        if n in pivots:
            return None
        piv_rows = list(zip(pivots, m[: len(pivots)]))
    pivot_cols = {p for p, _ in piv_rows}
    free = [c for c in range(n) if c not in pivot_cols]
    # Put the target (last permuted column) first among free variables.
    if target is not None and (n - 1) in free:
        free.remove(n - 1)
        free.insert(0, n - 1)
    fidx = {c: i for i, c in enumerate(free)}
    nf = len(free)
    piv_of = dict(piv_rows)

    def substitute(a, b):
        ap = [a[j] for j in order]
        coeffs = [Fraction(0)] * nf
        rhs = b
        for c, v in enumerate(ap):
            if not v:
                continue
            if c in fidx:
                coeffs[fidx[c]] += v
            else:
                row = piv_of[c]
                rhs -= v * row[n]
                for f in free:
                    if row[f]:
                        coeffs[fidx[f]] -= v * row[f]
        return tuple(coeffs), rhs

    rows = [substitute(a, b) for a, b in ineqs]
    target_free = target is not None and free and free[0] == n - 1
    res = _fm_solve(rows, nf, maximize_first=target_free)
    if res is None:
        return None
    y, sup = res
    xp = [Fraction(0)] * n
    for c in free:
        xp[c] = y[fidx[c]]
    for p, row in piv_rows:
        xp[p] = row[n] - sum((row[f] * xp[f] for f in free if row[f]), Fraction(0))
    x = [Fraction(0)] * n
    for pos, j in enumerate(order):
        x[j] = xp[pos]
    if target is None:
        return x, None
    if not target_free:
        sup = x[target]
    return x, sup


def _chart_rows(P: HPolyhedron):
    eqs = [(c.coeffs[1:], c.rhs) for c in P.equalities]
    ineqs = [(c.coeffs[1:], c.rhs) for c in P.inequalities]
    return eqs, ineqs


def _point(x) -> TorusPoint:
    return TorusPoint([Fraction(0)] + list(x))


def feasible(P: HPolyhedron, strict: bool = False) -> Optional[TorusPoint]:
    """A point of P, or None.  ``strict`` demands every inequality strictly."""
    eqs, ineqs = _chart_rows(P)
    d = P.dim
    if not strict or not ineqs:
        res = _lp(eqs, ineqs, d)
        return None if res is None else _point(res[0])
    # maximize t subject to a.x + t <= b, t <= 1; t is variable 0
    eqs_t = [((Fraction(0),) + a, b) for a, b in eqs]
    ineqs_t = [((Fraction(1),) + a, b) for a, b in ineqs]
    ineqs_t.append(((Fraction(1),) + (Fraction(0),) * d, Fraction(1)))
    res = _lp(eqs_t, ineqs_t, d + 1, target=0)
    if res is None:
        return None
    x, sup = res
    if sup is None or sup <= 0:
        return None
    return _point(x[1:])


def maximize(P: HPolyhedron, coeffs: Sequence) -> Optional[tuple]:
    """(supremum or None if unbounded, attaining point) of coeffs.x over P.

    Returns None when P is empty.
    """
    d = P.dim
    coeffs = tuple(as_rational(c) for c in coeffs)
    if len(coeffs) != d + 1 or sum(coeffs) != 0:
        raise PreconditionError("objective must have d+1 coefficients summing to zero", coeffs)
    eqs, ineqs = _chart_rows(P)
    zero = (Fraction(0),)
    # z - obj.x = 0 with z as variable 0
    eqs_z = [(zero + a, b) for a, b in eqs]
    eqs_z.append(((Fraction(1),) + tuple(-c for c in coeffs[1:]), Fraction(0)))
    ineqs_z = [(zero + a, b) for a, b in ineqs]
    res = _lp(eqs_z, ineqs_z, d + 1, target=0)
    if res is None:
        return None
    x, sup = res
    return sup, _point(x[1:])


def implies(P: HPolyhedron, c: Constraint) -> bool:
    """Every point of the (non-empty) P satisfies c."""
    res = maximize(P, c.coeffs)
    if res is None:
        return True
    sup = res[0]
    if sup is None or sup > c.rhs:
        return False
    if c.rel == EQ:
        low = maximize(P, [-v for v in c.coeffs])[0]
        return low is not None and -low >= c.rhs
    return True


def contained_in(P: HPolyhedron, Q: HPolyhedron) -> bool:
    return all(implies(P, c) for c in Q.constraints)


def same_set(P: HPolyhedron, Q: HPolyhedron) -> bool:
    return contained_in(P, Q) and contained_in(Q, P)


def implicit_equalities(P: HPolyhedron) -> list[Constraint]:
    """Inequalities of a non-empty P that hold with equality on all of P."""
    out = []
    for c in P.inequalities:
        res = maximize(P, [-v for v in c.coeffs])
        if res is not None and res[0] is not None and -res[0] >= c.rhs:
            out.append(Constraint(c.coeffs, c.rhs, EQ))
    return out


def affine_dimension(P: HPolyhedron) -> int:
    if feasible(P) is None:
        return -1
    eqs = [c.coeffs[1:] for c in P.equalities]
    if feasible(P, strict=True) is None:
        eqs += [c.coeffs[1:] for c in implicit_equalities(P)]
    return P.dim - (_linalg.rank(eqs) if eqs else 0)


def relative_interior_point(P: HPolyhedron) -> Optional[TorusPoint]:
    """A point of P strictly satisfying every non-implicit inequality."""
    if feasible(P) is None:
        return None
    imp = implicit_equalities(P)
    if not imp:
        return feasible(P, strict=True) or feasible(P)
    tight = {(c.coeffs, c.rhs) for c in imp}
    cons = list(P.equalities) + imp
    cons += [c for c in P.inequalities if (c.coeffs, c.rhs) not in tight]
    return feasible(HPolyhedron(P.dim, cons), strict=True)


VERTEX_DIM_GUARD = 3


def vertices(P: HPolyhedron) -> list[TorusPoint]:
    d = P.dim
    if d > VERTEX_DIM_GUARD:
        raise GuardExceeded(f"vertex enumeration limited to d <= {VERTEX_DIM_GUARD}", d)
    eqs = P.equalities
    ineqs = P.inequalities
    need = d - _linalg.rank([c.coeffs[1:] for c in eqs]) if eqs else d
    found = set()
    for subset in combinations(range(len(ineqs)), max(need, 0)):
        active = eqs + [ineqs[i] for i in subset]
        a = [c.coeffs[1:] for c in active]
        if _linalg.rank(a) != d:
            continue
        sol = _linalg.solve(a, [c.rhs for c in active])
        if sol is None:
            continue
        pt = _point(sol)
        if P.contains(pt):
            found.add(pt)
    return sorted(found)


def irredundant(P: HPolyhedron) -> list[Constraint]:
    """Inequalities not implied by the remaining constraints (facet candidates)."""
    cons = list(P.constraints)
    keep = []
    for i, c in enumerate(cons):
        if c.rel == EQ:
            continue
        rest = HPolyhedron(P.dim, cons[:i] + cons[i + 1:])
        if not implies(rest, c):
            keep.append(c)
        else:
            cons[i] = Constraint(tuple(0 for _ in c.coeffs), Fraction(0), LE)
    return keep


# ---------------------------------------------------------------- polytropes


def _to_scaled(c: Sequence[Sequence], extra: Sequence = ()) -> tuple[list, int, list]:
    dens = [x.denominator for row in c for x in row if x is not None]
    dens += [Fraction(x).denominator for x in extra]
    s = lcm(*dens) if dens else 1
    n = len(c)
    flat = []
    for row in c:
        for x in row:
            flat.append(_kernel.INF if x is None else int(x * s))
    return flat, s, [int(Fraction(v) * s) for v in extra]


def _from_scaled(flat: list, n: int, s: int) -> tuple:
    inf = _kernel.INF
    return tuple(
        tuple(None if flat[i * n + j] >= inf else Fraction(flat[i * n + j], s) for j in range(n))
        for i in range(n)
    )


class Polytrope:
    """Closed difference-bound system x_i - x_j <= c[i][j] (None means +inf)."""

    __slots__ = ("dim", "c", "_hash")

    def __init__(self, dim: int, c: tuple):
        # Callers normally go through polytrope_close; c must already be closed.
        self.dim = dim
        self.c = c
        self._hash = None

    @classmethod
    def whole(cls, d: int) -> "Polytrope":
        n = d + 1
        return cls(d, tuple(tuple(Fraction(0) if i == j else None for j in range(n)) for i in range(n)))

    @classmethod
    def ball(cls, d: int, radius=1, center: Optional[TorusPoint] = None) -> "Polytrope":
        r = as_rational(radius)
        n = d + 1
        a = center.coords if center is not None else (Fraction(0),) * n
        rows = tuple(
            tuple(Fraction(0) if i == j else r + a[i] - a[j] for j in range(n)) for i in range(n)
        )
        return cls(d, rows)

    @classmethod
    def facet_cone(cls, a: TorusPoint, p: int, q: int) -> "Polytrope":
        """Closed cone a + cone(Facet(p,q)): (x-a)_p >= (x-a)_j >= (x-a)_q."""
        d = a.dim
        n = d + 1
        c = [[None] * n for _ in range(n)]
        for i in range(n):
            c[i][i] = Fraction(0)
        p0, q0 = p - 1, q - 1
        for j in range(n):
            if j != p0:
                c[j][p0] = a[j] - a[p0]
            if j != q0:
                c[q0][j] = a[q0] - a[j]
        res = polytrope_close(d, c)
        assert res is not None
        return res

    @property
    def n(self) -> int:
        return self.dim + 1

    def bound(self, i: int, j: int):
        """Tight bound on x_i - x_j (1-based), None for +inf."""
        return self.c[i - 1][j - 1]

    def range_of(self, p: int, q: int) -> tuple:
        """[inf, sup] of x_p - x_q over the polytrope (None for infinite)."""
        lo = self.c[q - 1][p - 1]
        return (None if lo is None else -lo), self.c[p - 1][q - 1]

    def is_full_dimensional(self) -> bool:
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.c[i][j], self.c[j][i]
                if a is not None and b is not None and a + b <= 0:
                    return False
        return True

    def is_bounded(self) -> bool:
        return all(x is not None for row in self.c for x in row)

    def contains(self, x) -> bool:
        v = x.coords if isinstance(x, TorusPoint) else x
        n = self.n
        for i in range(n):
            for j in range(n):
                b = self.c[i][j]
                if b is not None and i != j and v[i] - v[j] > b:
                    return False
        return True

    def contains_interior(self, x) -> bool:
        v = x.coords if isinstance(x, TorusPoint) else x
        n = self.n
        for i in range(n):
            for j in range(n):
                b = self.c[i][j]
                if b is not None and i != j and v[i] - v[j] >= b:
                    return False
        return True

    def constraints(self) -> list[Constraint]:
        d, n = self.dim, self.n
        out = []
        for i in range(n):
            for j in range(n):
                b = self.c[i][j]
                if i != j and b is not None:
                    out.append(difference(d, i + 1, j + 1, b))
        return out

    def to_hpolyhedron(self) -> HPolyhedron:
        return HPolyhedron(self.dim, self.constraints())

    def interior_point(self) -> Optional[TorusPoint]:
        """A rational point strictly inside (None unless full-dimensional)."""
        if not self.is_full_dimensional():
            return None
        n = self.n
        finite = [abs(x) for row in self.c for x in row if x is not None]
        big = n * (max(finite) if finite else Fraction(0)) + 1
        gap = min(
            [self.c[i][j] + self.c[j][i] for i in range(n) for j in range(i + 1, n)
             if self.c[i][j] is not None and self.c[j][i] is not None] + [Fraction(1)]
        )
        t = gap / (2 * n)
        m = [
            [Fraction(0) if i == j else (big if self.c[i][j] is None else min(self.c[i][j], big)) - t
             for j in range(n)]
            for i in range(n)
        ]
        for i in range(n):
            m[i][i] = Fraction(0)
        closed = polytrope_close(self.dim, m)
        assert closed is not None
        return TorusPoint([-closed.c[0][j] for j in range(n)])

    def vertices(self) -> list[TorusPoint]:
        return vertices(self.to_hpolyhedron())

    def key(self) -> tuple:
        return self.c

    def __eq__(self, other) -> bool:
        return isinstance(other, Polytrope) and self.c == other.c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def __lt__(self, other: "Polytrope") -> bool:
        return _sort_key(self) < _sort_key(other)

    def __repr__(self) -> str:
        return f"Polytrope(d={self.dim}, c={self.to_json()['bounds']})"

    def to_json(self) -> dict:
        return {
            "dimension": self.dim,
            "bounds": [[None if x is None else rat_str(x) for x in row] for row in self.c],
        }


def _sort_key(p: Polytrope) -> tuple:
    return tuple((x is None, x if x is not None else 0) for row in p.c for x in row)


def polytrope_close(d: int, c: Sequence[Sequence]) -> Optional[Polytrope]:
    """Shortest-path closure of the bound matrix; None when empty."""
    n = d + 1
    if len(c) != n or any(len(row) != n for row in c):
        raise DimensionMismatch("bound matrix must be (d+1)x(d+1)", d)
    rows = [[None if x is None else as_rational(x) for x in row] for row in c]
    for i in range(n):
        if rows[i][i] is None or rows[i][i] != 0:
            if rows[i][i] is not None and rows[i][i] < 0:
                return None
            rows[i][i] = Fraction(0)
    flat, s, _ = _to_scaled(rows)
    if not _kernel.close(flat, n):
        return None
    return Polytrope(d, _from_scaled(flat, n, s))


def polytrope_from_scaled(d: int, flat: list, s: int) -> Polytrope:
    return Polytrope(d, _from_scaled(flat, d + 1, s))


def polytrope_intersect(p: Polytrope, q: Polytrope) -> Optional[Polytrope]:
    if p.dim != q.dim:
        raise DimensionMismatch("dimension mismatch", p, q)
    n = p.n
    m = [
        [
            q.c[i][j] if p.c[i][j] is None else p.c[i][j] if q.c[i][j] is None else min(p.c[i][j], q.c[i][j])
            for j in range(n)
        ]
        for i in range(n)
    ]
    return polytrope_close(p.dim, m)


# ---------------------------------------------------------------- semi-polytropes


def quad_coeffs(d: int, i: int, j: int, k: int, l: int) -> tuple:
    """Coefficients of e_i - e_j - e_k + e_l (1-based)."""
    c = [Fraction(0)] * (d + 1)
    for idx, w in ((i, 1), (j, -1), (k, -1), (l, 1)):
        c[idx - 1] += w
    return tuple(c)


class SemiPolytrope:
    """A polytrope cut by halfspaces x_i - x_j - x_k + x_l <= r for a fixed anchor (i,j)."""

    __slots__ = ("base", "anchor", "extra")

    def __init__(self, base: Optional[Polytrope], anchor: tuple, extra: Optional[dict] = None):
        self.base = base  # None means empty
        self.anchor = tuple(anchor)
        self.extra = dict(extra or {})

    @property
    def dim(self) -> int:
        return self.base.dim if self.base is not None else -1

    def is_empty_base(self) -> bool:
        return self.base is None

    def constraints(self) -> list[Constraint]:
        i, j = self.anchor
        d = self.base.dim
        out = self.base.constraints()
        for (k, l), r in sorted(self.extra.items()):
            out.append(Constraint(quad_coeffs(d, i, j, k, l), r, LE))
        return out

    def to_hpolyhedron(self) -> HPolyhedron:
        return HPolyhedron(self.base.dim, self.constraints())

    def contains(self, x) -> bool:
        if self.base is None or not self.base.contains(x):
            return False
        v = x.coords if isinstance(x, TorusPoint) else x
        i, j = self.anchor
        for (k, l), r in self.extra.items():
            if v[i - 1] - v[j - 1] - v[k - 1] + v[l - 1] > r:
                return False
        return True

    def feasible(self) -> Optional[TorusPoint]:
        if self.base is None:
            return None
        if not self.extra:
            return self.base.interior_point() or feasible(self.base.to_hpolyhedron())
        return feasible(self.to_hpolyhedron())

    def interior_point(self) -> Optional[TorusPoint]:
        if self.base is None:
            return None
        if not self.extra:
            return self.base.interior_point()
        return feasible(self.to_hpolyhedron(), strict=True)

    def facets(self) -> list[Constraint]:
        if self.base is None:
            return []
        return irredundant(self.to_hpolyhedron())

    def to_json(self) -> dict:
        i, j = self.anchor
        return {
            "anchor": [i, j],
            "base": None if self.base is None else self.base.to_json(),
            "cuts": [
                {"k": k, "l": l, "rhs": rat_str(r)} for (k, l), r in sorted(self.extra.items())
            ],
        }

    def __repr__(self) -> str:
        return f"SemiPolytrope(anchor={self.anchor}, cuts={len(self.extra)})"


def semipolytrope_cut(s: SemiPolytrope, anchor: tuple, k: int, l: int, rhs) -> SemiPolytrope:
    """Intersect with x_i - x_j - x_k + x_l <= rhs where (i,j) = anchor."""
    if tuple(anchor) != s.anchor:
        raise PreconditionError("anchor mismatch", s.anchor, tuple(anchor))
    rhs = as_rational(rhs)
    if s.base is None:
        return s
    i, j = s.anchor
    d = s.base.dim
    if k == l:
        return s if rhs >= 0 else SemiPolytrope(None, s.anchor)
    # Degenerate normals reduce to a single coordinate difference.
    if k == i and l == j:
        return s if rhs >= 0 else SemiPolytrope(None, s.anchor)
    if (k, l) == (j, i):
        p, q, r = i, j, rhs / 2
    elif k == i:
        p, q, r = l, j, rhs
    elif l == j:
        p, q, r = i, k, rhs
    else:
        extra = dict(s.extra)
        old = extra.get((k, l))
        if old is None or rhs < old:
            extra[(k, l)] = rhs
        return SemiPolytrope(s.base, s.anchor, extra)
    m = [list(row) for row in s.base.c]
    cur = m[p - 1][q - 1]
    if cur is None or r < cur:
        m[p - 1][q - 1] = r
    return SemiPolytrope(polytrope_close(d, m), s.anchor, s.extra)

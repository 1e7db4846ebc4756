"""Exact tropical metric, torus points and the combinatorics of the unit ball.

Coordinates are 1-based in every external-facing structure (face types,
functionals, partitions); Python indexing of ``TorusPoint`` is 0-based.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from . import _linalg
from .errors import (
    DimensionMismatch,
    GuardExceeded,
    NotAFacet,
    ParseError,
    PreconditionError,
    ZeroVectorError,
)
from .serialize import rat_str

Rational = Fraction

_RAT_RE = re.compile(r"[+-]?\d+(/\d+)?")


def as_rational(x) -> Fraction:
    """Exact conversion of ints, Fractions and "p/q" strings.

    Floats are rejected on purpose: they would silently smuggle rounding in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not _RAT_RE.fullmatch(s):
            raise ParseError(f"malformed rational {x!r}", x)
        num, _, den = s.partition("/")
        q = int(den) if den else 1
        if q == 0:
            raise ParseError(f"zero denominator in {x!r}", x)
        return Fraction(int(num), q)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class TorusPoint:
    """A point of R^{d+1}/R(1,...,1), stored with first coordinate 0."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        vals = tuple(as_rational(c) for c in coords)
        if len(vals) < 2:
            raise ValueError("a torus point needs at least two coordinates")
        base = vals[0]
        object.__setattr__(self, "coords", tuple(v - base for v in vals) if base else vals)

    def __setattr__(self, name, value):
        raise AttributeError("TorusPoint is immutable")

    def __reduce__(self):
        return (TorusPoint, (self.coords,))

    @classmethod
    def of(cls, *vals) -> "TorusPoint":
        return cls(vals)

    @classmethod
    def zero(cls, d: int) -> "TorusPoint":
        return cls((0,) * (d + 1))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusPoint) and self.coords == other.coords

    def __lt__(self, other: "TorusPoint") -> bool:
        return self.coords < other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return "TorusPoint(" + ", ".join(rat_str(c) for c in self.coords) + ")"

    def _check(self, other: "TorusPoint") -> None:
        if len(other.coords) != len(self.coords):
            raise DimensionMismatch("dimension mismatch", self, other)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-a for a in self.coords)

    def scale(self, alpha) -> "TorusPoint":
        alpha = as_rational(alpha)
        return TorusPoint(alpha * a for a in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list:
        return [rat_str(c) for c in self.coords]


def point(*vals) -> TorusPoint:
    return TorusPoint(vals)


class SiteSet:
    """An ordered list of pairwise distinct torus points of one dimension."""

    __slots__ = ("dim", "sites")

    def __init__(self, sites: Iterable):
        pts = tuple(s if isinstance(s, TorusPoint) else TorusPoint(s) for s in sites)
        if not pts:
            raise PreconditionError("a site set needs at least one site")
        d = pts[0].dim
        for s in pts:
            if s.dim != d:
                raise DimensionMismatch("sites of different dimensions", pts[0], s)
        seen = {}
        for i, s in enumerate(pts):
            if s in seen:
                raise PreconditionError("duplicate site", seen[s], i, s)
            seen[s] = i
        self.dim = d
        self.sites = pts

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator[TorusPoint]:
        return iter(self.sites)

    def __getitem__(self, i) -> TorusPoint:
        return self.sites[i]

    def index(self, a: TorusPoint) -> int:
        try:
            return self.sites.index(a)
        except ValueError:
            raise PreconditionError("site not in set", a) from None

    def __eq__(self, other) -> bool:
        return isinstance(other, SiteSet) and self.sites == other.sites

    def __hash__(self) -> int:
        return hash(self.sites)

    def __repr__(self) -> str:
        return f"SiteSet({list(self.sites)!r})"

    def to_json(self) -> list:
        return [s.to_json() for s in self.sites]


def _as_site_set(S) -> SiteSet:
    return S if isinstance(S, SiteSet) else SiteSet(S)


# ---------------------------------------------------------------- distance


def trop_dist(a: TorusPoint, b: TorusPoint) -> Fraction:
    if len(a.coords) != len(b.coords):
        raise DimensionMismatch("dimension mismatch", a, b)
    diff = [x - y for x, y in zip(a.coords, b.coords)]
    return max(diff) - min(diff)


# ---------------------------------------------------------------- faces


@dataclass(frozen=True)
class FaceType:
    """Face of the tropical unit ball, as a partition (F_-, F_*, F_+) of [d+1]."""

    dim: int
    minus: frozenset
    star: frozenset
    plus: frozenset

    def __post_init__(self):
        full = set(range(1, self.dim + 2))
        parts = (self.minus, self.star, self.plus)
        if set().union(*parts) != full or sum(map(len, parts)) != len(full):
            raise ValueError(f"not a partition of 1..{self.dim + 1}: {parts}")
        if not self.minus or not self.plus:
            raise ValueError("F_- and F_+ must be non-empty")

    @classmethod
    def make(cls, minus, plus, d: int) -> "FaceType":
        minus, plus = frozenset(minus), frozenset(plus)
        star = frozenset(range(1, d + 2)) - minus - plus
        return cls(d, minus, star, plus)

    @classmethod
    def from_signs(cls, signs: str) -> "FaceType":
        """Parse a sign string such as "-*+" (one character per coordinate)."""
        d = len(signs) - 1
        groups = {"-": set(), "*": set(), "+": set()}
        for i, ch in enumerate(signs, start=1):
            if ch not in groups:
                raise ParseError(f"bad face sign {ch!r}", signs)
            groups[ch].add(i)
        try:
            return cls(d, frozenset(groups["-"]), frozenset(groups["*"]), frozenset(groups["+"]))
        except ValueError as exc:
            raise ParseError(str(exc), signs) from None

    @property
    def dimension(self) -> int:
        return len(self.star)

    @property
    def is_facet(self) -> bool:
        return len(self.minus) == 1 and len(self.plus) == 1

    @property
    def signs(self) -> str:
        out = []
        for i in range(1, self.dim + 2):
            out.append("-" if i in self.minus else "+" if i in self.plus else "*")
        return "".join(out)

    def sort_key(self) -> tuple:
        return (tuple(sorted(self.minus)), tuple(sorted(self.plus)))

    def __lt__(self, other: "FaceType") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        if self.is_facet:
            return f"Facet({next(iter(self.plus))},{next(iter(self.minus))})"
        return f"Face({self.signs})"

    def to_json(self) -> str:
        return self.signs


def facet(p: int, q: int, d: int) -> FaceType:
    """The facet with F_+ = {p} and F_- = {q}; its functional is x_p - x_q."""
    if p == q or not (1 <= p <= d + 1 and 1 <= q <= d + 1):
        raise ValueError(f"invalid facet ({p},{q}) for d={d}")
    return FaceType.make({q}, {p}, d)


def all_facets(d: int) -> list[FaceType]:
    return enumerate_faces(d, d - 1)


def face_of_direction(v: TorusPoint) -> FaceType:
    if v.is_zero():
        raise ZeroVectorError("zero direction has no face", v)
    hi, lo = max(v.coords), min(v.coords)
    plus = {i + 1 for i, x in enumerate(v.coords) if x == hi}
    minus = {i + 1 for i, x in enumerate(v.coords) if x == lo}
    return FaceType.make(minus, plus, v.dim)


def enumerate_faces(d: int, k: int) -> list[FaceType]:
    if d < 1 or not 0 <= k <= d - 1:
        raise PreconditionError(f"face dimension {k} out of range for d={d}", d, k)
    out = []
    for labels in product("-*+", repeat=d + 1):
        if labels.count("*") == k and "-" in labels and "+" in labels:
            out.append(FaceType.from_signs("".join(labels)))
    out.sort(key=FaceType.sort_key)
    return out


@dataclass(frozen=True)
class LinearFunctional:
    """x -> x_top - x_bottom, well defined on the torus."""

    top: int
    bottom: int

    def __call__(self, v) -> Fraction:
        return v[self.top - 1] - v[self.bottom - 1]

    def coefficients(self, d: int) -> tuple:
        c = [0] * (d + 1)
        c[self.top - 1] += 1
        c[self.bottom - 1] -= 1
        return tuple(c)


def facet_functional(f: FaceType) -> LinearFunctional:
    if not f.is_facet:
        raise NotAFacet("functional requested for a non-facet face", f)
    return LinearFunctional(next(iter(f.plus)), next(iter(f.minus)))


def face_functional(f: FaceType) -> LinearFunctional:
    """Functional agreeing with dist(0, .) on the closed cone over any face."""
    return LinearFunctional(min(f.plus), min(f.minus))


# ---------------------------------------------------------------- partitions


@dataclass(frozen=True)
class OrderedPartition:
    parts: tuple
    values: tuple

    def to_json(self) -> dict:
        return {
            "parts": [sorted(p) for p in self.parts],
            "values": [rat_str(x) for x in self.values],
        }


def ordered_partition(v: Sequence) -> OrderedPartition:
    vals = [as_rational(x) for x in v]
    if not vals:
        raise PreconditionError("empty vector")
    distinct = sorted(set(vals))
    parts = tuple(frozenset(i + 1 for i, x in enumerate(vals) if x == val) for val in distinct)
    return OrderedPartition(parts, tuple(distinct))


class Placement(NamedTuple):
    kind: str  # "part" or "gap"
    index: int  # 1-based part k, or gap between parts k and k+1


@dataclass(frozen=True)
class BisectedOrderedPartition:
    partition: OrderedPartition
    midvalue: Fraction
    placement: Placement

    @property
    def combinatorial_type(self) -> tuple:
        parts = tuple(tuple(sorted(p)) for p in self.partition.parts)
        return parts, tuple(self.placement)

    def is_maximal(self) -> bool:
        """All parts singletons and midvalue in a gap: a maximal bisection cone."""
        return self.placement.kind == "gap" and all(len(p) == 1 for p in self.partition.parts)

    def to_json(self) -> dict:
        out = self.partition.to_json()
        out["midvalue"] = rat_str(self.midvalue)
        out["placement"] = {"kind": self.placement.kind, "index": self.placement.index}
        return out


def midvalue(v: Sequence) -> Fraction:
    return (max(v) + min(v)) / 2


def bisected_ordered_partition(v) -> BisectedOrderedPartition:
    vals = list(v.coords) if isinstance(v, TorusPoint) else [as_rational(x) for x in v]
    if max(vals) == min(vals):
        raise ZeroVectorError("constant vector is zero in the torus", v)
    op = ordered_partition(vals)
    mu = midvalue(vals)
    if mu in op.values:
        placement = Placement("part", op.values.index(mu) + 1)
    else:
        k = sum(1 for x in op.values if x < mu)
        placement = Placement("gap", k)
    return BisectedOrderedPartition(op, mu, placement)


def tropical_segment(a: TorusPoint, b: TorusPoint) -> tuple[list[TorusPoint], TorusPoint]:
    """Breakpoints of the max-tropical segment from a to b, and its midpoint."""
    if len(a) != len(b):
        raise DimensionMismatch("dimension mismatch", a, b)
    if a == b:
        raise ZeroVectorError("segment endpoints coincide", a)
    v = [y - x for x, y in zip(a.coords, b.coords)]
    levels = sorted(set(v), reverse=True)

    def at(t):
        return TorusPoint(max(x + t, y) for x, y in zip(a.coords, b.coords))

    breakpoints = [at(t) for t in levels]
    mu = midvalue(v)
    return breakpoints, at(mu)


# ---------------------------------------------------------------- general position


class PositionCheck(NamedTuple):
    ok: bool
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _distinct_coords(v) -> bool:
    return len(set(v)) == len(v)


def weak_general_position(S) -> PositionCheck:
    S = _as_site_set(S)
    for i, j in combinations(range(len(S)), 2):
        if not _distinct_coords((S[j] - S[i]).coords):
            return PositionCheck(False, (i, j))
    return PositionCheck(True)


def pair_general_position(a: TorusPoint, b: TorusPoint) -> bool:
    if a == b:
        raise ZeroVectorError("points coincide", a)
    return bisected_ordered_partition(b - a).is_maximal()


def digraph_arcs(faces: Sequence[FaceType]) -> list[tuple[int, int]]:
    arcs = []
    for f in faces:
        lam = facet_functional(f)
        arcs.append((lam.bottom, lam.top))
    return arcs


def digraph_condition(faces: Sequence[FaceType]) -> bool:
    """Graph test: no cycle, or a unique cycle traversed unevenly.

    Arcs run from the minimized to the maximized coordinate.  Along the
    cycle each arc is counted as forward or backward relative to one fixed
    traversal; the cycle is unbalanced when the two counts differ.
    """
    arcs = digraph_arcs(faces)
    if not arcs:
        return True
    parent: dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    nodes = {v for arc in arcs for v in arc}
    for t, h in arcs:
        parent[find(t)] = find(h)
    comps = len({find(v) for v in nodes})
    cyclomatic = len(arcs) - len(nodes) + comps
    if cyclomatic == 0:
        return True
    if cyclomatic > 1:
        return False
    live = set(range(len(arcs)))
    changed = True
    while changed:
        changed = False
        deg: dict[int, list[int]] = {}
        for e in live:
            for v in arcs[e]:
                deg.setdefault(v, []).append(e)
        for v, es in deg.items():
            if len(es) == 1:
                live.discard(es[0])
                changed = True
    start = min(live)
    node = arcs[start][0]
    edge = start
    fwd = bwd = 0
    for _ in range(len(live)):
        t, h = arcs[edge]
        if t == node:
            fwd += 1
            node = h
        else:
            bwd += 1
            node = t
        edge = next(e for e in sorted(live) if e != edge and node in arcs[e])
    return fwd != bwd


def functionals_independent(faces: Sequence[FaceType]) -> bool:
    """Rank test: lambda_{F_i} - lambda_{F_1} (i >= 2) linearly independent."""
    if len(faces) <= 1:
        return True
    d = faces[0].dim
    base = facet_functional(faces[0]).coefficients(d)
    rows = []
    for f in faces[1:]:
        c = facet_functional(f).coefficients(d)
        rows.append([x - y for x, y in zip(c, base)])
    return _linalg.rank(rows) == len(rows)


GUARD_SITES = 12
GUARD_DIM = 4


def set_general_position(S, *, max_sites: int = GUARD_SITES, max_dim: int = GUARD_DIM) -> PositionCheck:
    """Stability of every facet-tuple bisector cell under perturbation.

    Checks all subsets of at most d+2 sites.  The witness of a failure is
    (site indices, facet tuple).
    """
    from .bisect import iter_nonempty_cells
    from .polyhedra import feasible

    S = _as_site_set(S)
    n, d = len(S), S.dim
    if n < 2:
        raise PreconditionError("general position needs at least two sites")
    if n > max_sites or d > max_dim:
        raise GuardExceeded(f"set_general_position guard: n<={max_sites}, d<={max_dim}", n, d)
    weak = weak_general_position(S)
    if not weak:
        return PositionCheck(False, weak.witness)
    for idx, faces, cell in iter_nonempty_cells(S, max_size=d + 2):
        if not cell.q_full_dimensional():
            return PositionCheck(False, (idx, faces))
        if feasible(cell.strict_system(), strict=True) is None:
            return PositionCheck(False, (idx, faces))
        if not functionals_independent(faces):
            return PositionCheck(False, (idx, faces))
    return PositionCheck(True)

"""Tropical bisectors: cells, two-point classification, sectors, circumcenters.

Conventions: a point x lies in the cell of the face tuple (F_1, ..., F_k) for
sites a_1, ..., a_k when every x - a_i lies in the closed cone over F_i (its
maximal coordinates include F_+ and its minimal ones include F_-) and all the
distances dist(a_i, x) agree.  The facet functional x_p - x_q of
Facet(p, q) then measures that distance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, NamedTuple, Optional, Sequence

from . import polyhedra as ph
from .errors import (
    DimensionMismatch,
    GeneralPositionError,
    PreconditionError,
    ZeroVectorError,
)
from .polyhedra import EQ, Constraint, HPolyhedron, Polytrope
from .serialize import rat_str
from .trop_core import (
    BisectedOrderedPartition,
    FaceType,
    SiteSet,
    TorusPoint,
    all_facets,
    bisected_ordered_partition,
    face_functional,
    facet,
    facet_functional,
    trop_dist,
    weak_general_position,
)

# ---------------------------------------------------------------- labeling


@dataclass(frozen=True)
class LabelingPartition:
    zero: frozenset
    plus: frozenset
    minus: frozenset
    plus_one: frozenset
    minus_one: frozenset
    star: frozenset

    def to_json(self) -> dict:
        return {
            "L0": sorted(self.zero),
            "L+": sorted(self.plus),
            "L-": sorted(self.minus),
            "L+1": sorted(self.plus_one),
            "L-1": sorted(self.minus_one),
            "L*": sorted(self.star),
        }


def labeling_partition(F: FaceType, G: FaceType) -> LabelingPartition:
    if F.dim != G.dim:
        raise DimensionMismatch("faces of different dimensions", F, G)
    return LabelingPartition(
        zero=(F.minus & G.minus) | (F.plus & G.plus),
        plus=(F.plus & G.star) | (F.star & G.minus),
        minus=(F.minus & G.star) | (F.star & G.plus),
        plus_one=F.plus & G.minus,
        minus_one=F.minus & G.plus,
        star=F.star & G.star,
    )


class BisectorWitness(NamedTuple):
    gamma: Fraction
    delta: Fraction

    def to_json(self) -> dict:
        return {"gamma": rat_str(self.gamma), "delta": rat_str(self.delta)}


def _vals(v, idx) -> list:
    return [v[i - 1] for i in idx]


def _closed_form(L: LabelingPartition, v) -> Optional[BisectorWitness]:
    vals = list(v)
    lo_v, hi_v = min(vals), max(vals)
    mu = (lo_v + hi_v) / 2
    z = set(_vals(v, L.zero))
    minus = _vals(v, L.minus)
    plus = _vals(v, L.plus)
    if len(z) > 1:
        return None
    lo = max(minus) if minus else None
    hi = min(plus) if plus else None
    if lo is not None and hi is not None and lo > hi:
        return None
    if z:
        (g0,) = z
        if (lo is not None and lo > g0) or (hi is not None and g0 > hi):
            return None
    p1, m1 = L.plus_one, L.minus_one
    if not p1 and not m1:
        gamma = next(iter(z)) if z else lo if lo is not None else hi if hi is not None else mu
        return BisectorWitness(gamma, max(gamma - lo_v, hi_v - gamma, Fraction(0)))
    if p1 and not m1:
        if any(x != hi_v for x in _vals(v, p1)):
            return None
        if any(x > mu for x in list(z) + minus):
            return None
        gamma = max(list(z) + minus + [lo_v])
        return BisectorWitness(gamma, hi_v - gamma)
    if m1 and not p1:
        if any(x != lo_v for x in _vals(v, m1)):
            return None
        if any(x < mu for x in list(z) + plus):
            return None
        gamma = min(list(z) + plus + [hi_v])
        return BisectorWitness(gamma, gamma - lo_v)
    if any(x != lo_v for x in _vals(v, m1)) or any(x != hi_v for x in _vals(v, p1)):
        return None
    if any(x > mu for x in minus) or any(x != mu for x in z) or any(x < mu for x in plus):
        return None
    return BisectorWitness(mu, (hi_v - lo_v) / 2)


def system_feasible(F: FaceType, G: FaceType, v) -> Optional[BisectorWitness]:
    """Generic exact solve of the (gamma, delta) interval system."""
    L = labeling_partition(F, G)
    one, zero = Fraction(1), Fraction(0)
    rows = [((zero, -one), zero)]  # delta >= 0
    for idx, lo_s, hi_s in (
        (L.zero, 0, 0),
        (L.plus, 0, 1),
        (L.minus, -1, 0),
        (L.minus_one, -1, -1),
        (L.plus_one, 1, 1),
        (L.star, -1, 1),
    ):
        for i in idx:
            x = v[i - 1]
            # gamma + lo_s*delta <= x <= gamma + hi_s*delta
            rows.append(((one, Fraction(lo_s)), x))
            rows.append(((-one, -Fraction(hi_s)), -x))
    res = ph._fm_solve(rows, 2)
    if res is None:
        return None
    g, dlt = res[0]
    return BisectorWitness(g, dlt)


def _check_nonzero(v) -> None:
    if max(v) == min(v):
        raise ZeroVectorError("difference vector is zero in the torus", v)


def cell_feasible_two(F: FaceType, G: FaceType, v) -> Optional[BisectorWitness]:
    """Witness (gamma, delta) that the (F,G) cell of bis(a, a+v) is non-empty, or None."""
    vals = v.coords if isinstance(v, TorusPoint) else tuple(v)
    _check_nonzero(vals)
    if F.is_facet and G.is_facet:
        return _closed_form(labeling_partition(F, G), vals)
    return system_feasible(F, G, vals)


def lift_witness(a: TorusPoint, b: TorusPoint, F: FaceType, G: FaceType, w: BisectorWitness) -> TorusPoint:
    """A point x of the (F,G) cell at distance delta from both sites."""
    gamma, delta = w
    s = []
    for i, (ai, bi) in enumerate(zip(a.coords, b.coords), start=1):
        v = bi - ai
        if i in F.minus:
            lo = hi = delta
        elif i in F.plus:
            lo = hi = Fraction(0)
        else:
            lo, hi = Fraction(0), delta
        if i in G.minus:
            blo = bhi = gamma + delta
        elif i in G.plus:
            blo = bhi = gamma
        else:
            blo, bhi = gamma, gamma + delta
        lo, hi = max(lo, blo - v), min(hi, bhi - v)
        if lo > hi:
            raise ValueError("witness does not lift")
        s.append(lo)
    return TorusPoint(ai - si for ai, si in zip(a.coords, s))


# ---------------------------------------------------------------- cell geometry


def cone_constraints(a: TorusPoint, F: FaceType) -> list[Constraint]:
    """x - a in the closed cone over F."""
    d = a.dim
    out = []
    p0, q0 = min(F.plus), min(F.minus)
    for p in F.plus:
        if p != p0:
            out.append(ph.difference(d, p, p0, a[p - 1] - a[p0 - 1], EQ))
    for q in F.minus:
        if q != q0:
            out.append(ph.difference(d, q, q0, a[q - 1] - a[q0 - 1], EQ))
    for j in F.star:
        out.append(ph.difference(d, j, p0, a[j - 1] - a[p0 - 1]))
        out.append(ph.difference(d, q0, j, a[q0 - 1] - a[j - 1]))
    if not F.star:
        out.append(ph.difference(d, q0, p0, a[q0 - 1] - a[p0 - 1]))
    return out


def distance_equalities(sites: Sequence[TorusPoint], faces: Sequence[FaceType]) -> list[Constraint]:
    """lambda_{F_i}(x - a_i) = lambda_{F_1}(x - a_1) for i >= 2."""
    d = sites[0].dim
    lam0 = face_functional(faces[0])
    base = lam0.coefficients(d)
    r0 = lam0(sites[0].coords)
    out = []
    for a, F in zip(sites[1:], faces[1:]):
        lam = face_functional(F)
        c = tuple(Fraction(x - y) for x, y in zip(lam.coefficients(d), base))
        out.append(Constraint(c, lam(a.coords) - r0, EQ))
    return out


def q_polytrope(sites: Sequence[TorusPoint], faces: Sequence[FaceType]) -> Optional[Polytrope]:
    """Closed intersection of the facet cones, or None if empty."""
    d = sites[0].dim
    P = Polytrope.whole(d)
    for a, F in zip(sites, faces):
        if not F.is_facet:
            raise PreconditionError("q_polytrope expects facets", F)
        lam = facet_functional(F)
        P = ph.polytrope_intersect(P, Polytrope.facet_cone(a, lam.top, lam.bottom))
        if P is None:
            return None
    return P


def cell_geometry(sites: Sequence[TorusPoint], faces: Sequence[FaceType]) -> HPolyhedron:
    d = sites[0].dim
    if all(F.is_facet for F in faces):
        Q = q_polytrope(sites, faces)
        if Q is None:
            # Keep a recognisably infeasible system.
            return HPolyhedron(d, [ph.difference(d, 1, 2, -1), ph.difference(d, 2, 1, 0)])
        cons = Q.constraints()
    else:
        cons = [c for a, F in zip(sites, faces) for c in cone_constraints(a, F)]
    return HPolyhedron(d, cons + distance_equalities(sites, faces))


@dataclass
class BisectorCell:
    sites: tuple
    faces: tuple
    geometry: HPolyhedron
    dim: int
    point: Optional[TorusPoint] = None  # relative interior point

    def distance(self) -> Fraction:
        return trop_dist(self.sites[0], self.point)

    def vertices(self) -> list[TorusPoint]:
        return ph.vertices(self.geometry)

    def to_json(self) -> dict:
        out = {
            "faces": [f.signs for f in self.faces],
            "dimension": self.dim,
            "point": None if self.point is None else self.point.to_json(),
            "geometry": self.geometry.to_json(),
        }
        if self.geometry.dim <= ph.VERTEX_DIM_GUARD:
            out["vertices"] = [v.to_json() for v in self.vertices()]
        return out


def _make_cell(sites, faces, geometry) -> Optional[BisectorCell]:
    pt = ph.relative_interior_point(geometry)
    if pt is None:
        return None
    return BisectorCell(tuple(sites), tuple(faces), geometry, ph.affine_dimension(geometry), pt)


def maximal_cells(cells: list[BisectorCell]) -> list[BisectorCell]:
    """Drop cells contained in another cell; keep one copy of equal geometries."""
    cells = sorted(cells, key=lambda c: (-c.dim, [f.sort_key() for f in c.faces]))
    keep: list[BisectorCell] = []
    for c in cells:
        dominated = False
        for k in keep:
            if k.dim < c.dim:
                continue
            if not k.geometry.contains(c.point):
                continue
            if ph.contained_in(c.geometry, k.geometry):
                dominated = True
                break
        if not dominated:
            keep.append(c)
    keep.sort(key=lambda c: [f.sort_key() for f in c.faces])
    return keep


def _require_weak(S: SiteSet, allow_degenerate: bool) -> None:
    if allow_degenerate:
        return
    chk = weak_general_position(S)
    if not chk:
        i, j = chk.witness
        raise GeneralPositionError(
            "sites are not in weak general position", i, j, S[i], S[j]
        )


def bisector_two(a: TorusPoint, b: TorusPoint, *, allow_degenerate: bool = False) -> list[BisectorCell]:
    if a == b:
        raise ZeroVectorError("sites coincide", a)
    if a.dim != b.dim:
        raise DimensionMismatch("dimension mismatch", a, b)
    _require_weak(SiteSet([a, b]), allow_degenerate)
    v = b - a
    cells = []
    facets = all_facets(a.dim)
    for F in facets:
        for G in facets:
            if cell_feasible_two(F, G, v) is None:
                continue
            c = _make_cell((a, b), (F, G), cell_geometry((a, b), (F, G)))
            if c is not None:
                cells.append(c)
    return maximal_cells(cells)


def iter_nonempty_cells(S: SiteSet, *, max_size: Optional[int] = None,
                        min_size: int = 2) -> Iterator[tuple]:
    """All (site indices, facet tuple, cell) with non-empty Q∩H.

    Subsets of sizes min_size..max_size in lexicographic order.  A tuple's cell
    lies inside the cell of each prefix, so empty prefixes are pruned.
    """
    n, d = len(S), S.dim
    top = min(n, max_size if max_size is not None else n)
    facets = all_facets(d)
    wanted = range(min_size, top + 1)

    def rec(idx: tuple, faces: tuple, Q: Optional[Polytrope]):
        for F in facets:
            a = S[idx[-1]]
            lam = facet_functional(F)
            cone = Polytrope.facet_cone(a, lam.top, lam.bottom)
            Q2 = cone if Q is None else ph.polytrope_intersect(Q, cone)
            if Q2 is None:
                continue
            fs = faces + (F,)
            sites = [S[i] for i in idx]
            cell = _QHCell(sites, fs, Q2)
            if len(idx) > 1 and ph.feasible(cell.geometry()) is None:
                continue
            if len(idx) in wanted:
                yield idx, fs, cell
            if len(idx) < top:
                for j in range(idx[-1] + 1, n):
                    yield from rec(idx + (j,), fs, Q2)

    for i in range(n):
        yield from rec((i,), (), None)


class _QHCell:
    """Lazy Q∩H data for one facet tuple."""

    __slots__ = ("sites", "faces", "Q", "_geom")

    def __init__(self, sites, faces, Q: Polytrope):
        self.sites = sites
        self.faces = faces
        self.Q = Q
        self._geom = None

    def geometry(self) -> HPolyhedron:
        if self._geom is None:
            self._geom = HPolyhedron(self.Q.dim, self.Q.constraints() + distance_equalities(self.sites, self.faces))
        return self._geom

    def q_full_dimensional(self) -> bool:
        return self.Q.is_full_dimensional()

    def strict_system(self) -> HPolyhedron:
        return self.geometry()


def bisector_k(S, *, allow_degenerate: bool = False) -> list[BisectorCell]:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    k, d = len(S), S.dim
    if not 2 <= k <= d + 1:
        raise PreconditionError(f"bisector_k needs 2 <= k <= d+1 sites (k={k}, d={d})", k, d)
    _require_weak(S, allow_degenerate)
    cells = []
    for idx, faces, qh in iter_nonempty_cells(S, min_size=k, max_size=k):
        if idx != tuple(range(k)):
            continue
        c = _make_cell(qh.sites, faces, qh.geometry())
        if c is not None:
            cells.append(c)
    return maximal_cells(cells)


def cell_components(cells: Sequence[BisectorCell]) -> int:
    """Connected components of a union of cells; adjacent iff they intersect."""
    n = len(cells)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in combinations(range(n), 2):
        if find(i) == find(j):
            continue
        if ph.feasible(cells[i].geometry.intersect(cells[j].geometry)) is not None:
            parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def circumcenters(S) -> list[TorusPoint]:
    """Points equidistant to all d+1 sites (the 0-dimensional maximal cells)."""
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    if len(S) != S.dim + 1:
        raise PreconditionError("circumcenters need exactly d+1 sites", len(S), S.dim)
    cells = bisector_k(S, allow_degenerate=True)
    return sorted({c.point for c in cells if c.dim == 0})


# ---------------------------------------------------------------- classification


def bop_class(a: TorusPoint, b: TorusPoint) -> BisectedOrderedPartition:
    if a == b:
        raise ZeroVectorError("sites coincide", a)
    return bisected_ordered_partition(b - a)


def same_bisector_class(v, w) -> bool:
    return bisected_ordered_partition(v).combinatorial_type == bisected_ordered_partition(w).combinatorial_type


# ---------------------------------------------------------------- sectors


@dataclass(frozen=True)
class Sector:
    site: TorusPoint
    facets: frozenset

    def to_json(self) -> dict:
        return {"site": self.site.to_json(), "facets": [repr(f) for f in sorted(self.facets)]}


def halfsphere(v) -> frozenset:
    vals = v.coords if isinstance(v, TorusPoint) else tuple(v)
    _check_nonzero(vals)
    d = len(vals) - 1
    return frozenset(
        facet(p, q, d)
        for p in range(1, d + 2)
        for q in range(1, d + 2)
        if p != q and vals[p - 1] > vals[q - 1]
    )


def sector(S, a: TorusPoint) -> Sector:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    S.index(a)
    out = set()
    for F in all_facets(S.dim):
        lam = facet_functional(F)
        va = lam(a.coords)
        if all(va < lam(b.coords) for b in S if b != a):
            out.add(F)
    return Sector(a, frozenset(out))


def ridge_adjacent(F: FaceType, G: FaceType) -> bool:
    p, q = facet_functional(F).top, facet_functional(F).bottom
    r, s = facet_functional(G).top, facet_functional(G).bottom
    return F != G and p != s and q != r and len({p, q, r, s}) == 3


def sector_components(s) -> int:
    facets = sorted(s.facets if isinstance(s, Sector) else s)
    parent = {f: f for f in facets}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for F, G in combinations(facets, 2):
        if ridge_adjacent(F, G):
            parent[find(F)] = find(G)
    return len({find(f) for f in facets})


class EmptyBisector:
    """Marker: some sector is empty, so the bisector is empty."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "EMPTY_BISECTOR"

    def to_json(self) -> str:
        return "empty"


EMPTY_BISECTOR = EmptyBisector()


def predicted_components_3pts(S):
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    if len(S) != 3:
        raise PreconditionError("exactly three sites required", len(S))
    _require_weak(S, False)
    comps = []
    for a in S:
        sec = sector(S, a)
        if not sec.facets:
            return EMPTY_BISECTOR
        comps.append(sector_components(sec))
    return sum(comps) - 2


# ---------------------------------------------------------------- hypersurface


@dataclass(frozen=True)
class AffineTerm:
    """x_i - x_j + (c_j - c_i) for the site c in group 'a' or 'b'."""

    group: str
    i: int
    j: int
    const: Fraction

    def __call__(self, x) -> Fraction:
        return x[self.i - 1] - x[self.j - 1] + self.const

    def key(self) -> tuple:
        return (self.i, self.j, self.const)


def hypersurface_terms(a: TorusPoint, b: TorusPoint) -> list[AffineTerm]:
    _require_weak(SiteSet([a, b]), False)
    n = a.dim + 1
    out = []
    for name, c in (("a", a), ("b", b)):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    out.append(AffineTerm(name, i, j, c[j - 1] - c[i - 1]))
    return out


def hypersurface_vanishes(a: TorusPoint, b: TorusPoint, x: TorusPoint) -> bool:
    terms = hypersurface_terms(a, b)
    vals = [t(x.coords) for t in terms]
    m = max(vals)
    return sum(1 for v in vals if v == m) >= 2


def maximizing_groups(a: TorusPoint, b: TorusPoint, x: TorusPoint) -> set:
    terms = hypersurface_terms(a, b)
    vals = [t(x.coords) for t in terms]
    m = max(vals)
    return {t.group for t, v in zip(terms, vals) if v == m}

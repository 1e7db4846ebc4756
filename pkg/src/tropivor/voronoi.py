"""Tropical Voronoi diagrams from polytrope partitions.

Two partitions are supported: the standard arrangement S + A_d (every
hyperplane x_i - x_j = a_i - a_j) and the coarser common refinement of the
fans a + F(B^d), built by randomized incremental insertion into a
polytrope tree.  On every cell of either partition each distance function
dist(., a) is linear, so the lower envelope inside a cell is cut out by
halfspaces with normals e_i - e_j - e_k + e_l.

Internally all sites are scaled to integers by the least common multiple of
their denominators; bound matrices are flat lists handled by the kernels.
"""
from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Callable, Optional, Sequence

from . import _kernel
from . import polyhedra as ph
from .errors import DegeneracyError, GeneralPositionError, GuardExceeded, PreconditionError
from .polyhedra import Constraint, HPolyhedron, Polytrope, SemiPolytrope
from .serialize import rat_str
from .trop_core import SiteSet, TorusPoint, facet, weak_general_position

INF = _kernel.INF

STANDARD_GUARD = {2: 50, 3: 12}


# ---------------------------------------------------------------- scaling


def _scale_of(points) -> int:
    dens = [c.denominator for p in points for c in p.coords]
    return lcm(*dens) if dens else 1


def _scaled(p: TorusPoint, s: int) -> list:
    return [int(c * s) for c in p.coords]


def _whole(n: int) -> list:
    return [0 if i == j else INF for i in range(n) for j in range(n)]


def _unscale(m: list, n: int, s: int, d: int) -> Polytrope:
    return ph.polytrope_from_scaled(d, m, s)


def _contains_scaled(m: list, n: int, X, k: int = 1) -> bool:
    """X lies in the scaled polytrope m; X is given multiplied by k."""
    for i in range(n):
        xi = X[i]
        row = i * n
        for j in range(n):
            b = m[row + j]
            if b < INF and i != j and xi - X[j] > b * k:
                return False
    return True


def _require_weak(S: SiteSet, allow_degenerate: bool = False) -> None:
    if allow_degenerate:
        return
    chk = weak_general_position(S)
    if not chk:
        i, j = chk.witness
        raise GeneralPositionError("sites are not in weak general position", i, j, S[i], S[j])


# ---------------------------------------------------------------- cells


@dataclass
class PartitionCell:
    geometry: Polytrope
    labeling: tuple = ()  # (site index, facet FaceType) pairs

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry.to_json(),
            "labeling": [[i, f.signs] for i, f in self.labeling],
        }


@dataclass
class DiagramCell:
    cell: PartitionCell
    pieces: list  # (site index, SemiPolytrope)

    def to_json(self) -> dict:
        out = self.cell.to_json()
        out["pieces"] = [{"site": i, "region": sp.to_json()} for i, sp in self.pieces]
        return out


class VoronoiDiagram:
    """Per-site lists of semi-polytropes plus a cell locator."""

    def __init__(self, sites: SiteSet, cells: list, locate_cell: Callable, algorithm: str):
        self.sites = sites
        self.cells = cells
        self._locate_cell = locate_cell
        self.algorithm = algorithm

    @property
    def regions(self) -> dict:
        out: dict = {i: [] for i in range(len(self.sites))}
        for c in self.cells:
            for i, sp in c.pieces:
                out[i].append(sp)
        return out

    def locate(self, x: TorusPoint) -> int:
        c = self.cells[self._locate_cell(x)]
        if len(c.pieces) == 1:  # the pieces of a cell cover it
            return c.pieces[0][0]
        for i, sp in c.pieces:
            if sp.contains(x):
                return i
        raise DegeneracyError("point not covered by its cell's pieces", x)

    def region_contains(self, i: int, x: TorusPoint) -> bool:
        return any(sp.contains(x) for sp in self.regions[i])

    def to_json(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "sites": self.sites.to_json(),
            "regions": [
                {"site": i, "pieces": [sp.to_json() for sp in sps]} for i, sps in self.regions.items()
            ],
        }


# ---------------------------------------------------------------- standard partition


class _Standard:
    """Cells of S + A_d keyed by the interval chosen for every coordinate pair."""

    def __init__(self, S: SiteSet):
        self.S = S
        self.d = S.dim
        self.n = n = S.dim + 1
        self.s = _scale_of(S)
        self.A = [_scaled(a, self.s) for a in S]
        self.pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.values = [sorted({a[i] - a[j] for a in self.A}) for i, j in self.pairs]
        self.cells: dict = {}
        self._enumerate()

    def _enumerate(self) -> None:
        n = self.n
        out = self.cells

        def rec(k: int, m: list, key: tuple):
            if k == len(self.pairs):
                out[key] = m
                return
            i, j = self.pairs[k]
            V = self.values[k]
            up, down = m[i * n + j], m[j * n + i]
            t0 = 0 if down >= INF else bisect_right(V, -down)
            t1 = len(V) if up >= INF else bisect_left(V, up)
            for t in range(t0, t1 + 1):
                c = list(m)
                if t < len(V) and V[t] < c[i * n + j]:
                    c[i * n + j] = V[t]
                if t > 0 and -V[t - 1] < c[j * n + i]:
                    c[j * n + i] = -V[t - 1]
                if _kernel.close(c, n) and _kernel.full_dimensional(c, n):
                    rec(k + 1, c, key + (t,))

        rec(0, _whole(n), ())

    def locate_key(self, X, k: int = 1) -> Optional[tuple]:
        """Cell key of the scaled point X, given multiplied by k."""
        options = []
        for (i, j), V in zip(self.pairs, self.values):
            v = X[i] - X[j]
            t = bisect_left(V, v, key=lambda y: y * k)
            options.append((t, t + 1) if t < len(V) and V[t] * k == v else (t,))
        for key in product(*options):
            m = self.cells.get(key)
            if m is not None and _contains_scaled(m, self.n, X, k):
                return key
        return None


def standard_partition(S, *, guard: bool = True, allow_degenerate: bool = False) -> list[PartitionCell]:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    _check_guard(S, guard)
    _require_weak(S, allow_degenerate)
    st = _Standard(S)
    return [PartitionCell(_unscale(m, st.n, st.s, st.d)) for _, m in sorted(st.cells.items())]


def _check_guard(S: SiteSet, guard: bool) -> None:
    if not guard:
        return
    limit = STANDARD_GUARD.get(S.dim, 6)
    if len(S) > limit:
        raise GuardExceeded(f"standard partition limited to n <= {limit} for d={S.dim}", len(S), S.dim)


def arrangement_vertices(S) -> list[TorusPoint]:
    """Vertices of the arrangement S + A_d, collected from the standard cells."""
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    verts = set()
    for c in standard_partition(S):
        verts.update(c.geometry.vertices())
    return sorted(verts)


# ---------------------------------------------------------------- labeling and envelopes


def _label_scaled(m: list, n: int, A: list, cones: Optional[dict] = None,
                  matching: bool = True) -> list[tuple]:
    """Valid labeling of a scaled cell as (site, p, q) with 0-based p, q.

    ``cones`` maps site index to the flat facet index p*n+q of the cone that
    contains the cell; when missing it is computed.  With ``matching`` two
    sites sharing a facet is reported as a general-position failure;
    otherwise such ties are kept (their distance functions coincide).
    """
    info = []
    best_hi = None
    for k, a in enumerate(A):
        ci = cones[k] if cones is not None else _kernel.cone_index(m, n, a)
        if ci < 0:
            raise PreconditionError("cell meets several cones of one site", k)
        p, q = divmod(ci, n)
        off = a[p] - a[q]
        lo = None if m[q * n + p] >= INF else -m[q * n + p] - off
        hi = None if m[p * n + q] >= INF else m[p * n + q] - off
        info.append((k, p, q, lo, hi))
        if hi is not None and (best_hi is None or hi < best_hi):
            best_hi = hi
    cand = [t for t in info if best_hi is None or t[3] is None or t[3] <= best_hi]
    if len(cand) == 1:
        k, p, q, _, _ = cand[0]
        return [(k, p, q)]
    d = n - 1
    base = [
        ph.difference(d, i + 1, j + 1, m[i * n + j])
        for i in range(n) for j in range(n) if i != j and m[i * n + j] < INF
    ]
    out = []
    for k, p, q, _, _ in cand:
        a = A[k]
        cons = list(base)
        for k2, r, s_, _, _ in cand:
            if k2 == k:
                continue
            b = A[k2]
            coeffs = ph.quad_coeffs(d, p + 1, q + 1, r + 1, s_ + 1)
            cons.append(Constraint(coeffs, Fraction((a[p] - a[q]) - (b[r] - b[s_])), ph.LE))
        if ph.feasible(HPolyhedron(d, cons)) is not None:
            out.append((k, p, q))
    facets_used = [(p, q) for _, p, q in out]
    if matching and len(set(facets_used)) != len(facets_used):
        raise GeneralPositionError("two sites share a facet on one cell", [k for k, _, _ in out])
    return out


def _envelope(P: Polytrope, labels: list, S: SiteSet) -> list:
    pieces = []
    for k, p, q in labels:
        sp = SemiPolytrope(P, (p + 1, q + 1))
        a = S[k]
        for k2, r, s_ in labels:
            if k2 == k:
                continue
            b = S[k2]
            rhs = (a[p] - a[q]) - (b[r] - b[s_])
            sp = ph.semipolytrope_cut(sp, (p + 1, q + 1), r + 1, s_ + 1, rhs)
        if len(labels) == 1 or sp.interior_point() is not None:
            pieces.append((k, sp))
    return pieces


def _labeling_tuple(labels, d: int) -> tuple:
    return tuple((k, facet(p + 1, q + 1, d)) for k, p, q in labels)


def cell_labeling(P: Polytrope, S) -> PartitionCell:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    s = lcm(_scale_of(S), *[x.denominator for row in P.c for x in row if x is not None])
    n = S.dim + 1
    m = [INF if x is None else int(x * s) for row in P.c for x in row]
    labels = _label_scaled(m, n, [_scaled(a, s) for a in S])
    return PartitionCell(P, _labeling_tuple(labels, S.dim))


def envelope_in_cell(cell: PartitionCell, S) -> list:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    labels = []
    for k, F in cell.labeling:
        labels.append((k, min(F.plus) - 1, min(F.minus) - 1))
    return _envelope(cell.geometry, labels, S)


def voronoi_standard(S, *, guard: bool = True, allow_degenerate: bool = False) -> VoronoiDiagram:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    _check_guard(S, guard)
    _require_weak(S, allow_degenerate)
    st = _Standard(S)
    cells = []
    index = {}
    for key, m in sorted(st.cells.items()):
        labels = _label_scaled(m, st.n, st.A, matching=not allow_degenerate)
        P = _unscale(m, st.n, st.s, st.d)
        index[key] = len(cells)
        cells.append(DiagramCell(PartitionCell(P, _labeling_tuple(labels, st.d)), _envelope(P, labels, S)))

    def locate_cell(x: TorusPoint) -> int:
        k = lcm(*(c.denominator for c in x.coords))
        key = st.locate_key([int(c * st.s * k) for c in x.coords], k)
        if key is None:
            raise DegeneracyError("point outside every standard cell", x)
        return index[key]

    return VoronoiDiagram(S, cells, locate_cell, "standard")


# ---------------------------------------------------------------- polytrope tree


class _Node:
    __slots__ = ("m", "children", "site", "labels")

    def __init__(self, m: list, labels: Optional[dict] = None):
        self.m = m
        self.children: list = []
        self.site: Optional[int] = None
        self.labels: dict = labels or {}


class PolytropeTree:
    """Randomized incremental search structure whose leaves tile the torus."""

    def __init__(self, d: int):
        self.d = d
        self.n = d + 1
        self.scale = 1
        self.sites: list[TorusPoint] = []
        self.scaled: list[list] = []
        self.root = _Node(_whole(self.n))

    def _rescale(self, s: int) -> None:
        f = s // self.scale
        if f == 1:
            return
        stack = [self.root]
        while stack:
            node = stack.pop()
            node.m = [v if v >= INF else v * f for v in node.m]
            stack.extend(node.children)
        self.scaled = [[v * f for v in a] for a in self.scaled]
        self.scale = s

    def insert(self, b: TorusPoint) -> "PolytropeTree":
        if b.dim != self.d:
            raise PreconditionError("dimension mismatch", b)
        if b in self.sites:
            raise PreconditionError("duplicate site", b)
        self._rescale(lcm(self.scale, _scale_of([b])))
        k = len(self.sites)
        self.sites.append(b)
        B = _scaled(b, self.scale)
        self.scaled.append(B)
        n = self.n
        stack = [self.root]
        while stack:
            node = stack.pop()
            ci = _kernel.cone_index(node.m, n, B)
            if ci >= 0:
                node.labels[k] = ci
                continue
            if node.children:
                stack.extend(node.children)
                continue
            pieces = _kernel.split(node.m, n, B)
            if len(pieces) < 2:
                raise DegeneracyError("cell split produced fewer than two pieces", k, b)
            node.site = k
            node.children = [_Node(c, {k: p * n + q}) for p, q, c in pieces]
        return self

    def leaves(self) -> list[tuple]:
        """(node, depth, path labels) for every leaf, in depth-first order."""
        out = []
        stack = [(self.root, 0, {})]
        while stack:
            node, depth, labels = stack.pop()
            merged = {**labels, **node.labels}
            if not node.children:
                out.append((node, depth, merged))
            else:
                for ch in reversed(node.children):
                    stack.append((ch, depth + 1, merged))
        return out

    def leaf_polytropes(self) -> list[Polytrope]:
        return [_unscale(node.m, self.n, self.scale, self.d) for node, _, _ in self.leaves()]

    def leaf_keys(self) -> list[tuple]:
        """Closed scaled bound matrices of the leaves; canonical, so comparable across orders."""
        return [tuple(node.m) for node, _, _ in self.leaves()]

    def depths(self) -> list[int]:
        return [depth for _, depth, _ in self.leaves()]

    def locate_leaf(self, x: TorusPoint) -> _Node:
        k = lcm(*(c.denominator for c in x.coords))
        X = [int(c * self.scale * k) for c in x.coords]  # integer compares are much cheaper
        node = self.root
        while node.children:
            for ch in node.children:
                if _contains_scaled(ch.m, self.n, X, k):
                    node = ch
                    break
            else:
                raise DegeneracyError("point not covered by any child cell", x)
        return node


def tree_insert(T: PolytropeTree, b: TorusPoint) -> PolytropeTree:
    return T.insert(b)


def build_tree(S, seed: int = 0) -> PolytropeTree:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    order = list(range(len(S)))
    random.Random(seed).shuffle(order)
    T = PolytropeTree(S.dim)
    T._rescale(_scale_of(S))
    for i in order:
        T.insert(S[i])
    T.order = order
    return T


def voronoi_incremental(S, seed: int = 0, *, allow_degenerate: bool = False) -> VoronoiDiagram:
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    _require_weak(S, allow_degenerate)
    T = build_tree(S, seed)
    order = T.order
    n = T.n
    A = [T.scaled[order.index(i)] for i in range(len(S))]
    cells = []
    leaf_index = {}
    for node, _, labels in T.leaves():
        cones = {order[k]: ci for k, ci in labels.items()}
        lab = _label_scaled(node.m, n, A, cones, matching=not allow_degenerate)
        P = _unscale(node.m, n, T.scale, T.d)
        leaf_index[id(node)] = len(cells)
        cells.append(DiagramCell(PartitionCell(P, _labeling_tuple(lab, T.d)), _envelope(P, lab, S)))

    def locate_cell(x: TorusPoint) -> int:
        return leaf_index[id(T.locate_leaf(x))]

    D = VoronoiDiagram(S, cells, locate_cell, "incremental")
    D.tree = T
    return D

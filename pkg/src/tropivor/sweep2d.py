"""Beach-line sweep for tropical Voronoi diagrams in the plane T^3.

Chart: a point x is drawn as (u, w) = (x_2 - x_1, x_3 - x_1).  The sweep
line at time t is {u = t}; a site s is visited once s_u <= t, and the
distance from p to the line is |t - p_u|.

The beach line is parametrized by the row coordinate c = w - u/2, i.e. by
the isometric-horizontal direction (2, 1).  For a visited site s with
h = t - s_u and c' = c - (s_w - s_u/2), the equidistant curve of s and the
sweep line is the concave graph u = P_s(c) made of five pieces:

    c' <= -h          u = s_u + 2h + 2c'
    -h <= c' <= -h/4  u = s_u + (2h + 2c')/3
    |c'| <= h/4       u = s_u + h/2
    h/4 <= c' <= h    u = s_u + (2h - 2c')/3
    c' >= h           u = s_u + 2h - 2c'

The beach line is the upper envelope of these curves.  Breakpoints move
linearly until one crosses a kink (piece event) or two adjacent breakpoints
meet (circle event, a Voronoi vertex).  A site event covers the interval
where the new site's tent s_u - 2|c'| rises above the beach line: that part
of the beach line becomes Voronoi edges at once.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional

from .errors import DegeneracyError, GeneralPositionError, PreconditionError
from .serialize import rat_str
from .trop_core import SiteSet, TorusPoint

F0 = Fraction(0)
HALF = Fraction(1, 2)
SLOPES = (Fraction(2), Fraction(2, 3), F0, Fraction(-2, 3), Fraction(-2))
SPEEDS = (Fraction(2), Fraction(2, 3), HALF, Fraction(2, 3), Fraction(2))
BOUNDS = (
    (None, Fraction(-1)),
    (Fraction(-1), Fraction(-1, 4)),
    (Fraction(-1, 4), Fraction(1, 4)),
    (Fraction(1, 4), Fraction(1)),
    (Fraction(1), None),
)

CIRCLE, PIECE, SITE = 0, 1, 2


def to_point(u, w) -> TorusPoint:
    return TorusPoint((F0, u, w))


def chart(x: TorusPoint) -> tuple:
    c = x.coords
    return c[1] - c[0], c[2] - c[0]


class _Site:
    __slots__ = ("idx", "u", "w", "cs", "lines")

    def __init__(self, idx: int, p: TorusPoint):
        self.idx = idx
        self.u, self.w = chart(p)
        self.cs = self.w - self.u / 2
        u, cs = self.u, self.cs
        # u = alpha + beta*c + gamma*t for each piece
        self.lines = (
            (-u - 2 * cs, SLOPES[0], SPEEDS[0]),
            (u / 3 - 2 * cs / 3, SLOPES[1], SPEEDS[1]),
            (u / 2, SLOPES[2], SPEEDS[2]),
            (u / 3 + 2 * cs / 3, SLOPES[3], SPEEDS[3]),
            (-u + 2 * cs, SLOPES[4], SPEEDS[4]),
        )

    def bound(self, kappa, t):
        return self.cs + kappa * (t - self.u)

    def piece_at(self, c, t) -> int:
        h = t - self.u
        cp = c - self.cs
        if cp <= -h:
            return 0
        if cp <= -h / 4:
            return 1
        if cp <= h / 4:
            return 2
        if cp <= h:
            return 3
        return 4

    def value(self, c, t, piece: Optional[int] = None):
        i = self.piece_at(c, t) if piece is None else piece
        a, b, g = self.lines[i]
        return a + b * c + g * t

    def in_piece(self, i: int, c, t) -> bool:
        lo, hi = BOUNDS[i]
        if lo is not None and c < self.bound(lo, t):
            return False
        if hi is not None and c > self.bound(hi, t):
            return False
        return True

    def piece_range(self, i: int, t) -> tuple:
        lo, hi = BOUNDS[i]
        return (None if lo is None else self.bound(lo, t)), (None if hi is None else self.bound(hi, t))


# ---------------------------------------------------------------- parabola


@dataclass
class Parabola:
    focus: TorusPoint
    time: Fraction
    pieces: list  # (start point or None, end point or None, slope in the (c, u) chart)

    def value(self, c) -> Fraction:
        return _Site(-1, self.focus).value(Fraction(c), self.time)

    def point(self, c) -> TorusPoint:
        c = Fraction(c)
        u = self.value(c)
        return to_point(u, c + u / 2)


def parabola(focus: TorusPoint, t, *, allow_touching: bool = False) -> Parabola:
    """Equidistant curve of ``focus`` and the sweep line at time t."""
    if focus.dim != 2:
        raise PreconditionError("the sweep works in T^3 only", focus)
    t = Fraction(t)
    s = _Site(-1, focus)
    if s.u > t or (s.u == t and not allow_touching):
        raise PreconditionError("focus not yet strictly visited", focus, t)
    h = t - s.u
    kinks = [s.cs + k * h for k in (Fraction(-1), Fraction(-1, 4), Fraction(1, 4), Fraction(1))]
    pts = [to_point(s.value(c, t), c + s.value(c, t) / 2) for c in kinks]
    pieces = [(None, pts[0], SLOPES[0])]
    for i in range(3):
        if kinks[i] != kinks[i + 1]:
            pieces.append((pts[i], pts[i + 1], SLOPES[i + 1]))
    pieces.append((pts[3], None, SLOPES[4]))
    return Parabola(focus, t, pieces)


def distance_to_line(p: TorusPoint, t) -> Fraction:
    return abs(Fraction(t) - chart(p)[0])


# ---------------------------------------------------------------- beach line


class _Arc:
    __slots__ = ("site", "alive")

    def __init__(self, site: _Site):
        self.site = site
        self.alive = True


class _BP:
    __slots__ = ("l", "r", "pl", "pr", "A", "B", "start", "version", "alive")

    def __init__(self, l: _Site, r: _Site, pl: int, pr: int, A, B, start):
        self.l, self.r = l, r
        self.pl, self.pr = pl, pr
        self.A, self.B = A, B
        self.start = start
        self.version = 0
        self.alive = True

    def pos(self, t):
        return self.A + self.B * t

    def point(self, t) -> tuple:
        c = self.pos(t)
        a, b, g = self.l.lines[self.pl]
        u = a + b * c + g * t
        return u, c + u / 2

    def velocity(self) -> tuple:
        _, b, g = self.l.lines[self.pl]
        du = b * self.B + g
        return du, self.B + du / 2


def _trajectory(l: _Site, r: _Site, i: int, j: int):
    al, bl, gl = l.lines[i]
    ar, br, gr = r.lines[j]
    if bl == br:
        return None
    return (ar - al) / (bl - br), (gr - gl) / (bl - br)


def _stays(site: _Site, i: int, A, B, t0) -> bool:
    """The trajectory c = A + B t lies in piece i of ``site`` just after t0."""
    lo, hi = BOUNDS[i]
    c0 = A + B * t0
    if lo is not None:
        diff = c0 - site.bound(lo, t0)
        if diff < 0 or (diff == 0 and B - lo < 0):
            return False
    if hi is not None:
        diff = site.bound(hi, t0) - c0
        if diff < 0 or (diff == 0 and hi - B < 0):
            return False
    return True


@dataclass
class Segment:
    """Piece of the bisector of sites a and b; q is None for a ray with direction ``dir``."""

    p: tuple
    q: Optional[tuple]
    a: int
    b: int
    dir: Optional[tuple] = None


@dataclass
class SweepStats:
    site_events: int = 0
    circle_events: int = 0
    piece_events: int = 0
    stale_events: int = 0
    max_arcs_per_site: int = 0

    @property
    def total(self) -> int:
        return self.site_events + self.circle_events + self.piece_events


class _Sweep:
    def __init__(self, S: SiteSet, check=None):
        self.S = S
        self.sites = [_Site(i, p) for i, p in enumerate(S)]
        self.arcs: list[_Arc] = []
        self.bps: list[_BP] = []
        self.heap: list = []
        self.seq = 0
        self.segments: list[Segment] = []
        self.vertices: dict = {}
        self.stats = SweepStats()
        self.check = check
        self.t = None

    # -- queue
    def push(self, t, kind, key, payload) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (t, kind, key, self.seq, payload))

    def schedule_piece(self, bp: _BP) -> None:
        t0 = self.t
        best = None
        for site, i in ((bp.l, bp.pl), (bp.r, bp.pr)):
            lo, hi = BOUNDS[i]
            for kappa, sign in ((lo, 1), (hi, -1)):
                if kappa is None:
                    continue
                # g(t) = sign * (c(t) - bound(t)) must stay >= 0
                g0 = sign * (bp.pos(t0) - site.bound(kappa, t0))
                slope = sign * (bp.B - kappa)
                if slope < 0:
                    tt = t0 + g0 / (-slope)
                    if tt > t0 and (best is None or tt < best):
                        best = tt
        if best is not None:
            self.push(best, PIECE, (bp.l.idx, bp.r.idx), (bp, bp.version))

    def schedule_circle(self, k: int) -> None:
        """Circle event for the arc at index k (needs both neighbours)."""
        if k <= 0 or k >= len(self.arcs) - 1:
            return
        b1, b2 = self.bps[k - 1], self.bps[k]
        if b1.B <= b2.B:
            return
        tt = (b2.A - b1.A) / (b1.B - b2.B)
        # tt == now happens when several sites are equidistant from one vertex
        if tt < self.t:
            return
        arc = self.arcs[k]
        key = (b1.l.idx, arc.site.idx, b2.r.idx)
        self.push(tt, CIRCLE, key, (arc, b1, b1.version, b2, b2.version))

    # -- breakpoints
    def make_bp(self, l: _Site, r: _Site, c0, t0, start) -> _BP:
        for i in range(5):
            if not l.in_piece(i, c0, t0):
                continue
            for j in range(5):
                if not r.in_piece(j, c0, t0):
                    continue
                tr = _trajectory(l, r, i, j)
                if tr is None:
                    continue
                A, B = tr
                if A + B * t0 != c0:
                    continue
                if SLOPES[i] >= SLOPES[j]:
                    continue
                if _stays(l, i, A, B, t0) and _stays(r, j, A, B, t0):
                    return _BP(l, r, i, j, A, B, start)
        raise DegeneracyError("no consistent breakpoint pieces", l.idx, r.idx, c0, t0)

    def emit(self, p, q, a: int, b: int) -> None:
        if p != q:
            self.segments.append(Segment(p, q, a, b))

    def add_vertex(self, pt, sites) -> None:
        self.vertices.setdefault(pt, set()).update(sites)

    def close_bp(self, bp: _BP, end) -> None:
        self.emit(bp.start, end, bp.l.idx, bp.r.idx)
        bp.alive = False

    def index_of_arc(self, arc: _Arc, c) -> int:
        k = bisect_left(self.bps, c, key=lambda b: b.pos(self.t))
        for j in range(max(0, k - 2), min(len(self.arcs), k + 3)):
            if self.arcs[j] is arc:
                return j
        return self.arcs.index(arc)

    def beach_polyline(self, site: _Site, c_lo, c_hi, t) -> list:
        """Points of P_site between rows c_lo < c_hi (None = infinite), with its kinks."""
        h = t - site.u
        kinks = [site.cs + k * h for k in (Fraction(-1), Fraction(-1, 4), Fraction(1, 4), Fraction(1))]
        cs = [c for c in kinks if (c_lo is None or c > c_lo) and (c_hi is None or c < c_hi)]
        cs = sorted(set(cs))
        if c_lo is not None:
            cs.insert(0, c_lo)
        if c_hi is not None:
            cs.append(c_hi)
        return [(site.value(c, t), c + site.value(c, t) / 2) for c in cs]

    # -- events
    def site_event(self, s: _Site) -> None:
        self.stats.site_events += 1
        t = self.t
        if not self.arcs:
            self.arcs.append(_Arc(s))
            return

        k = bisect_left(self.bps, s.cs, key=lambda b: b.pos(t))
        # left end of the covered interval
        cL, kL = None, None
        idx, right = k, s.cs
        while idx >= 0:
            r = self.arcs[idx].site
            cl = self.bps[idx - 1].pos(t) if idx > 0 else None
            cut = self._crossing(s, r, cl, right, t, left=True)
            # a tent through an old breakpoint covers the arc up to it
            if cut is not None and (cut != cl or idx == 0):
                cL, kL = cut, idx
                break
            right = cl
            idx -= 1
        cR, kR = None, None
        idx, left = k, s.cs
        while idx < len(self.arcs):
            r = self.arcs[idx].site
            cr = self.bps[idx].pos(t) if idx < len(self.bps) else None
            cut = self._crossing(s, r, left, cr, t, left=False)
            if cut is not None and (cut != cr or idx == len(self.arcs) - 1):
                cR, kR = cut, idx
                break
            left = cr
            idx += 1
        lo_arc = kL if kL is not None else 0
        hi_arc = kR if kR is not None else len(self.arcs) - 1
        # instant edges along the covered beach portion
        for j in range(lo_arc, hi_arc + 1):
            r = self.arcs[j].site
            a = cL if j == lo_arc else self.bps[j - 1].pos(t)
            b = cR if j == hi_arc else self.bps[j].pos(t)
            pts = self.beach_polyline(r, a, b, t)
            for p, q in zip(pts, pts[1:]):
                self.emit(p, q, r.idx, s.idx)
            if a is None:
                self.segments.append(Segment(pts[0], None, r.idx, s.idx, (Fraction(-1), Fraction(-1))))
            if b is None:
                self.segments.append(Segment(pts[-1], None, r.idx, s.idx, (Fraction(-1), F0)))
        # breakpoints inside the interval end at vertices
        for j in range(lo_arc, hi_arc):
            bp = self.bps[j]
            pt = bp.point(t)
            self.close_bp(bp, pt)
            self.add_vertex(pt, (bp.l.idx, bp.r.idx, s.idx))
        new_arcs, new_bps = [], []
        if kL is not None:
            rl = self.arcs[kL].site
            u0 = rl.value(cL, t)
            new_arcs.append(self.arcs[kL] if kL != kR else _Arc(rl))
            new_bps.append(self.make_bp(rl, s, cL, t, (u0, cL + u0 / 2)))
        new_arcs.append(_Arc(s))
        if kR is not None:
            rr = self.arcs[kR].site
            u0 = rr.value(cR, t)
            new_arcs.append(self.arcs[kR] if kL != kR else _Arc(rr))
            new_bps.append(self.make_bp(s, rr, cR, t, (u0, cR + u0 / 2)))
        for j in range(lo_arc, hi_arc + 1):
            if self.arcs[j] not in new_arcs:
                self.arcs[j].alive = False
        self.arcs[lo_arc:hi_arc + 1] = new_arcs
        self.bps[lo_arc:hi_arc] = new_bps
        base = lo_arc
        for bp in new_bps:
            self.schedule_piece(bp)
        for j in range(base - 1, base + len(new_arcs) + 1):
            self.schedule_circle(j)

    @staticmethod
    def _crossing(s: _Site, r: _Site, c_lo, c_hi, t, left: bool):
        """Where the tent of s meets P_r on [c_lo, c_hi], or None when the tent is above throughout.

        Left of the apex tent - P_r is nondecreasing, so the answer is the
        largest c with tent <= P_r; right of the apex it is the smallest.
        """
        ts = Fraction(2) if left else Fraction(-2)
        for i in (range(4, -1, -1) if left else range(5)):
            plo, phi = r.piece_range(i, t)
            lo = plo if c_lo is None else (c_lo if plo is None else max(plo, c_lo))
            hi = phi if c_hi is None else (c_hi if phi is None else min(phi, c_hi))
            if lo is not None and hi is not None and lo > hi:
                continue
            a, b, g = r.lines[i]

            def f(c):
                return s.u + ts * (c - s.cs) - (a + b * c + g * t)

            near, far = (hi, lo) if left else (lo, hi)
            if f(near) <= 0:
                return near
            if ts == b or (far is not None and f(far) > 0):
                continue
            return (a + g * t - s.u + ts * s.cs) / (ts - b)
        return None

    def piece_event(self, bp: _BP) -> None:
        self.stats.piece_events += 1
        t = self.t
        c = bp.pos(t)
        pt = bp.point(t)
        self.emit(bp.start, pt, bp.l.idx, bp.r.idx)
        nb = self.make_bp(bp.l, bp.r, c, t, pt)
        bp.pl, bp.pr, bp.A, bp.B, bp.start = nb.pl, nb.pr, nb.A, nb.B, pt
        bp.version += 1
        self.schedule_piece(bp)
        k = self.bps.index(bp) if len(self.bps) < 64 else self._bp_index(bp, c)
        self.schedule_circle(k)
        self.schedule_circle(k + 1)

    def _bp_index(self, bp: _BP, c) -> int:
        k = bisect_left(self.bps, c, key=lambda b: b.pos(self.t))
        for j in range(max(0, k - 2), min(len(self.bps), k + 3)):
            if self.bps[j] is bp:
                return j
        return self.bps.index(bp)

    def circle_event(self, arc: _Arc, b1: _BP, b2: _BP) -> None:
        self.stats.circle_events += 1
        t = self.t
        c = b1.pos(t)
        pt = b1.point(t)
        k = self.index_of_arc(arc, c)
        l, r = b1.l, b2.r
        if l is r:
            raise DegeneracyError("arc vanished between two arcs of one site", l.idx, arc.site.idx)
        self.close_bp(b1, pt)
        self.close_bp(b2, pt)
        self.add_vertex(pt, (l.idx, arc.site.idx, r.idx))
        arc.alive = False
        nb = self.make_bp(l, r, c, t, pt)
        del self.arcs[k]
        self.bps[k - 1:k + 1] = [nb]
        self.schedule_piece(nb)
        self.schedule_circle(k - 1)
        self.schedule_circle(k)

    def run(self) -> None:
        for s in self.sites:
            self.push(s.u, SITE, (s.idx,), s)
        while self.heap:
            t, kind, _, _, payload = heapq.heappop(self.heap)
            self.t = t
            if kind == SITE:
                self.site_event(payload)
            elif kind == PIECE:
                bp, ver = payload
                if not bp.alive or bp.version != ver:
                    self.stats.stale_events += 1
                    continue
                self.piece_event(bp)
            else:
                arc, b1, v1, b2, v2 = payload
                if not (arc.alive and b1.alive and b2.alive and b1.version == v1 and b2.version == v2):
                    self.stats.stale_events += 1
                    continue
                self.circle_event(arc, b1, b2)
            if self.check is not None:
                self.check(self)
            counts: dict = {}
            for a in self.arcs:
                counts[a.site.idx] = counts.get(a.site.idx, 0) + 1
            self.stats.max_arcs_per_site = max(self.stats.max_arcs_per_site, max(counts.values()))
        for bp in self.bps:
            self.segments.append(Segment(bp.start, None, bp.l.idx, bp.r.idx, bp.velocity()))


# ---------------------------------------------------------------- local distance derivatives


def _ddist(x: tuple, a: tuple, v: tuple) -> Fraction:
    """One-sided derivative of dist(., a) at x in direction v (chart vectors)."""
    diff = (F0, x[0] - a[0], x[1] - a[1])
    vv = (F0, v[0], v[1])
    hi, lo = max(diff), min(diff)
    return max(vv[i] for i in range(3) if diff[i] == hi) - min(vv[i] for i in range(3) if diff[i] == lo)


def _left_site(seg_p, direction, a: int, b: int, sites: list, at) -> int:
    """Which of a, b owns the side to the left of ``direction`` at point ``at``."""
    n = (-direction[1], direction[0])
    da = _ddist(at, sites[a], n)
    db = _ddist(at, sites[b], n)
    if da < db:
        return a
    if db < da:
        return b
    # equal slopes only occur beside a two-dimensional piece of the bisector
    for k in range(1, 40):
        eps = Fraction(1, 2 ** k)
        x = (at[0] + eps * n[0], at[1] + eps * n[1])
        y = (at[0] - eps * n[0], at[1] - eps * n[1])
        fa = _chart_dist(x, sites[a]) - _chart_dist(x, sites[b])
        fb = _chart_dist(y, sites[a]) - _chart_dist(y, sites[b])
        if fa < 0 or fb > 0:
            return a
        if fa > 0 or fb < 0:
            return b
    raise DegeneracyError("bisector edge with coinciding distance slopes", a, b)


def _chart_dist(x: tuple, a: tuple) -> Fraction:
    diff = (F0, x[0] - a[0], x[1] - a[1])
    return max(diff) - min(diff)


# ---------------------------------------------------------------- DCEL


@dataclass
class HalfEdge:
    origin: Optional[int]  # vertex index; None is the vertex at infinity
    twin: int = -1
    next: int = -1
    prev: int = -1
    face: int = -1
    direction: tuple = (F0, F0)  # chart direction of travel


@dataclass
class Dcel:
    sites: SiteSet
    vertices: list  # chart tuples (u, w)
    halfedges: list
    faces: list  # site index per face
    vertex_sites: dict = field(default_factory=dict)
    stats: Optional[SweepStats] = None

    def __post_init__(self):
        self._locator = _SlabLocator(self)

    @property
    def edge_count(self) -> int:
        return len(self.halfedges) // 2

    def euler_characteristic(self) -> int:
        has_inf = any(h.origin is None for h in self.halfedges) or not self.halfedges
        return len(self.vertices) + (1 if has_inf else 0) - self.edge_count + len(self.faces)

    def voronoi_vertices(self) -> list[TorusPoint]:
        deg: dict = {}
        for h in self.halfedges:
            if h.origin is not None:
                deg[h.origin] = deg.get(h.origin, 0) + 1
        return [to_point(*self.vertices[v]) for v, k in sorted(deg.items()) if k >= 3]

    def edges(self) -> list[tuple]:
        """(start, end or None, direction, left site, right site) per edge."""
        out = []
        for i in range(0, len(self.halfedges), 2):
            h, tw = self.halfedges[i], self.halfedges[i + 1]
            p = None if h.origin is None else self.vertices[h.origin]
            q = None if tw.origin is None else self.vertices[tw.origin]
            out.append((p, q, h.direction, self.faces[h.face], self.faces[tw.face]))
        return out

    def locate(self, x: TorusPoint) -> int:
        return self._locator.locate(chart(x))

    def to_json(self) -> dict:
        def pt(p):
            return None if p is None else [rat_str(p[0]), rat_str(p[1])]

        return {
            "vertices": [pt(v) for v in self.vertices],
            "edges": [
                {
                    "start": pt(p),
                    "end": pt(q),
                    "direction": [rat_str(d[0]), rat_str(d[1])],
                    "left": a,
                    "right": b,
                }
                for p, q, d, a, b in self.edges()
            ],
            "faces": list(self.faces),
        }


def _half(v: tuple) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(a: tuple, b: tuple) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cr = a[0] * b[1] - a[1] * b[0]
    return -1 if cr > 0 else (1 if cr < 0 else 0)


def _merge_collinear(segs: list[Segment]) -> list[Segment]:
    """Join consecutive finite pieces of the same bisector that continue straight."""
    changed = True
    segs = list(segs)
    while changed:
        changed = False
        at: dict = {}
        for k, s in enumerate(segs):
            at.setdefault(s.p, []).append(k)
            if s.q is not None:
                at.setdefault(s.q, []).append(k)
        for v, ks in at.items():
            if len(ks) != 2:
                continue
            i, j = ks
            s1, s2 = segs[i], segs[j]
            if {s1.a, s1.b} != {s2.a, s2.b}:
                continue
            o1 = s1.q if s1.p == v else s1.p
            d1 = s1.dir if s1.q is None else (o1[0] - v[0], o1[1] - v[1])
            o2 = s2.q if s2.p == v else s2.p
            d2 = s2.dir if s2.q is None else (o2[0] - v[0], o2[1] - v[1])
            if s1.q is None and s1.p != v or s2.q is None and s2.p != v:
                continue
            if d1[0] * d2[1] - d1[1] * d2[0] != 0 or d1[0] * d2[0] + d1[1] * d2[1] >= 0:
                continue
            # v is an interior point of a straight piece
            if s1.q is None and s2.q is None:
                continue
            if s1.q is None:
                new = Segment(o2, None, s1.a, s1.b, s1.dir)
            elif s2.q is None:
                new = Segment(o1, None, s1.a, s1.b, s2.dir)
            else:
                new = Segment(o1, o2, s1.a, s1.b)
            segs = [s for k, s in enumerate(segs) if k not in (i, j)] + [new]
            changed = True
            break
    return segs


def build_dcel(S: SiteSet, segs: list[Segment], vertex_sites: dict, stats=None) -> Dcel:
    sites = [chart(p) for p in S]
    segs = _merge_collinear(segs)
    vid: dict = {}
    for s in segs:
        for p in (s.p, s.q):
            if p is not None and p not in vid:
                vid[p] = len(vid)
    verts = sorted(vid, key=lambda p: (p[0], p[1]))
    vid = {p: i for i, p in enumerate(verts)}
    hes: list[HalfEdge] = []
    left_site: list[int] = []
    for s in segs:
        if s.q is None:
            d = s.dir
            h1 = HalfEdge(vid[s.p], direction=d)
            h2 = HalfEdge(None, direction=(-d[0], -d[1]))
            at = (s.p[0] + d[0], s.p[1] + d[1])
        else:
            d = (s.q[0] - s.p[0], s.q[1] - s.p[1])
            h1 = HalfEdge(vid[s.p], direction=d)
            h2 = HalfEdge(vid[s.q], direction=(-d[0], -d[1]))
            at = ((s.p[0] + s.q[0]) / 2, (s.p[1] + s.q[1]) / 2)
        k = len(hes)
        h1.twin, h2.twin = k + 1, k
        hes += [h1, h2]
        ls = _left_site(s.p, d, s.a, s.b, sites, at)
        left_site += [ls, s.b if ls == s.a else s.a]
    # rotation systems
    out: dict = {}
    for k, h in enumerate(hes):
        out.setdefault(h.origin, []).append(k)
    for v, ks in out.items():
        if v is None:
            # around infinity: clockwise along a huge circle, ties by lateral offset
            def key_inf(k1, k2):
                d1 = tuple(-x for x in hes[k1].direction)
                d2 = tuple(-x for x in hes[k2].direction)
                c = _angle_cmp(d1, d2)
                if c:
                    return -c
                p1 = verts[hes[hes[k1].twin].origin]
                p2 = verts[hes[hes[k2].twin].origin]
                o1 = -d1[1] * p1[0] + d1[0] * p1[1]
                o2 = -d2[1] * p2[0] + d2[0] * p2[1]
                return -1 if o1 > o2 else (1 if o1 < o2 else 0)

            ks.sort(key=cmp_to_key(key_inf))
        else:
            ks.sort(key=cmp_to_key(lambda k1, k2: _angle_cmp(hes[k1].direction, hes[k2].direction)))
        m = len(ks)
        for idx, k in enumerate(ks):
            # the edge entering v along twin(k) continues with the next clockwise outgoing edge
            prev_out = ks[(idx - 1) % m]
            tw = hes[k].twin
            hes[tw].next = prev_out
            hes[prev_out].prev = tw
    faces: list[int] = []
    seen = [False] * len(hes)
    for k in range(len(hes)):
        if seen[k]:
            continue
        fidx = len(faces)
        site = left_site[k]
        j = k
        while not seen[j]:
            seen[j] = True
            hes[j].face = fidx
            if left_site[j] != site:
                raise DegeneracyError("face boundary mixes two sites", site, left_site[j])
            j = hes[j].next
        faces.append(site)
    if not hes:
        faces = [0]
    vs = {vid[p]: sorted(ss) for p, ss in vertex_sites.items() if p in vid}
    return Dcel(S, verts, hes, faces, vs, stats)


# ---------------------------------------------------------------- point location


class _SlabLocator:
    def __init__(self, D: Dcel):
        self.D = D
        self.sites = [chart(p) for p in D.sites]
        xs = sorted({v[0] for v in D.vertices})
        self.xs = xs
        self.edges = []  # (u_lo, u_hi, p, direction, above_site, below_site)
        self.vertical = []  # (u, w_lo, w_hi, right_site, left_site)
        for p, q, d, ls, rs in D.edges():
            if p is None:
                p, d = q, (-d[0], -d[1])
                ls, rs = rs, ls
            if d[0] == 0:
                lo = p[1] if q is None or d[1] > 0 else None
                hi = None if q is None and d[1] > 0 else (q[1] if q is not None else p[1])
                if q is not None:
                    lo, hi = min(p[1], q[1]), max(p[1], q[1])
                right = rs if d[1] > 0 else ls
                left = ls if d[1] > 0 else rs
                self.vertical.append((p[0], lo, hi, right, left))
                continue
            if q is None:
                ulo, uhi = (p[0], None) if d[0] > 0 else (None, p[0])
            else:
                ulo, uhi = min(p[0], q[0]), max(p[0], q[0])
            above = ls if d[0] > 0 else rs
            below = rs if d[0] > 0 else ls
            self.edges.append((ulo, uhi, p, d, above, below))
        self.bounds = [None] + xs + [None]
        self.slabs: dict = {}

    def slab(self, k: int) -> tuple:
        """Edges crossing slab k sorted bottom to top; built on first use."""
        if k not in self.slabs:
            lo, hi = self.bounds[k], self.bounds[k + 1]
            mid = self._mid(lo, hi)
            es = [e for e in self.edges if (e[0] is None or e[0] <= (lo if lo is not None else mid))
                  and (e[1] is None or e[1] >= (hi if hi is not None else mid))]
            es.sort(key=lambda e: self._w(e, mid))
            self.slabs[k] = (es, None if es else self._empty_label(lo))
        return self.slabs[k]

    @staticmethod
    def _mid(lo, hi):
        if lo is None and hi is None:
            return F0
        if lo is None:
            return hi - 1
        if hi is None:
            return lo + 1
        return (lo + hi) / 2

    @staticmethod
    def _w(e, u):
        p, d = e[2], e[3]
        return p[1] + d[1] * (u - p[0]) / d[0]

    def _empty_label(self, lo):
        for u, wlo, whi, right, left in self.vertical:
            if u == lo:
                return right
        return self.D.faces[0] if self.D.faces else 0

    def locate(self, x: tuple) -> int:
        u, w = x
        k = bisect_left(self.xs, u)
        # points on a slab boundary use the slab to the right
        if k < len(self.xs) and self.xs[k] == u:
            k += 1
        es, label = self.slab(k)
        if not es:
            return label
        j = bisect_left(es, w, key=lambda e: self._w(e, u))
        if j < len(es):
            return es[j][5]
        return es[-1][4]


# ---------------------------------------------------------------- driver


def _tied_pair(keys: list) -> Optional[tuple]:
    seen: dict = {}
    for k, v in enumerate(keys):
        if v in seen:
            return seen[v], k
        seen[v] = k
    return None


def plane_general_position(S: SiteSet) -> Optional[tuple]:
    """A pair of sites whose difference ties two coordinates, or None.

    In T^3 that means equal u, equal w or equal w - u, so sorting suffices.
    """
    pts = [chart(p) for p in S]
    for keys in ([p[0] for p in pts], [p[1] for p in pts], [p[1] - p[0] for p in pts]):
        pair = _tied_pair(keys)
        if pair is not None:
            return pair
    return None


def sweep(S, *, allow_degenerate: bool = False, check=None) -> Dcel:
    """Voronoi diagram of planar sites as a DCEL, by the beach-line sweep.

    ``allow_degenerate`` skips the weak general position check; only sites
    sharing the sweep coordinate are then rejected.
    """
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    if S.dim != 2:
        raise PreconditionError("the sweep works in T^3 (d = 2) only", S.dim)
    if not allow_degenerate:
        pair = plane_general_position(S)
        if pair is not None:
            i, j = pair
            raise GeneralPositionError("sites are not in weak general position", i, j, S[i], S[j])
    pair = _tied_pair([chart(p)[0] for p in S])
    if pair is not None:
        raise GeneralPositionError("two sites share the sweep coordinate", *pair)
    sw = _Sweep(S, check)
    sw.run()
    return build_dcel(S, sw.segments, sw.vertices, sw.stats)

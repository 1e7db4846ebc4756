"""SVG output for planar (d = 2) inputs in the isometric view.

A point x of T^3 is drawn at x_1 v_1 + x_2 v_2 + x_3 v_3 with
v_1 = (-sin 2pi/3, cos 2pi/3), v_2 = (sin 2pi/3, cos 2pi/3), v_3 = (0, 1).
The v_i sum to zero, so the picture does not depend on the representative.
Geometry stays exact up to the final projection to floats.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from . import polyhedra as ph
from .errors import PreconditionError
from .trop_core import SiteSet, TorusPoint

S3 = math.sin(2 * math.pi / 3)
C3 = math.cos(2 * math.pi / 3)
BASIS = ((-S3, C3), (S3, C3), (0.0, 1.0))
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


def project(x) -> tuple[float, float]:
    c = x.coords if isinstance(x, TorusPoint) else x
    px = sum(float(ci) * b[0] for ci, b in zip(c, BASIS))
    py = sum(float(ci) * b[1] for ci, b in zip(c, BASIS))
    return px, py


def viewport(S: SiteSet, margin=None) -> Fraction:
    """Half-width in chart coordinates of a square showing every site."""
    m = max((abs(c) for s in S for c in (s.coords[1] - s.coords[0], s.coords[2] - s.coords[0])), default=0)
    m = Fraction(m)
    return m + (Fraction(margin) if margin is not None else max(Fraction(2), m / 2))


def _box(R: Fraction) -> list:
    return [
        ph.difference(2, 2, 1, R), ph.difference(2, 1, 2, R),
        ph.difference(2, 3, 1, R), ph.difference(2, 1, 3, R),
    ]


def clipped_vertices(P: ph.HPolyhedron, R: Fraction) -> list[TorusPoint]:
    """Vertices of P inside the chart box |u|, |w| <= R, in counter-clockwise order."""
    Q = P.add(*_box(R))
    vs = ph.vertices(Q)
    if len(vs) < 3:
        return vs
    cx = sum(project(v)[0] for v in vs) / len(vs)
    cy = sum(project(v)[1] for v in vs) / len(vs)
    return sorted(vs, key=lambda v: math.atan2(project(v)[1] - cy, project(v)[0] - cx))


def _clip(poly: list, R: float) -> list:
    """Sutherland-Hodgman clip of a chart polygon to the square |u|, |w| <= R."""
    def cut(pts, inside, inter):
        out = []
        for k in range(len(pts)):
            p, q = pts[k - 1], pts[k]
            if inside(q):
                if not inside(p):
                    out.append(inter(p, q))
                out.append(q)
            elif inside(p):
                out.append(inter(p, q))
        return out

    def at(axis, val):
        def f(p, q):
            t = (val - p[axis]) / (q[axis] - p[axis])
            return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
        return f

    pts = list(poly)
    for axis in (0, 1):
        for sign in (1, -1):
            if not pts:
                return pts
            pts = cut(pts, lambda p, a=axis, s=sign: s * p[a] <= R, at(axis, sign * R))
    return pts


def dcel_polygons(D, R: Fraction) -> list[tuple[int, list]]:
    """(site, chart polygon) per face of a sweep DCEL, clipped to the viewport."""
    K = 8 * (R + max((max(abs(v[0]), abs(v[1])) for v in D.vertices), default=0) + 1)

    def exit_point(p, d):
        ts = []
        for axis in (0, 1):
            if d[axis] > 0:
                ts.append((K - p[axis]) / d[axis])
            elif d[axis] < 0:
                ts.append((-K - p[axis]) / d[axis])
        t = min(ts)
        return (p[0] + t * d[0], p[1] + t * d[1])

    def perim(p):
        u, w = p
        if u == K and w < K:
            return w + K
        if w == K and u > -K:
            return 2 * K + (K - u)
        if u == -K and w > -K:
            return 4 * K + (K - w)
        return 6 * K + (u + K)

    corners = [(K, K), (-K, K), (-K, -K), (K, -K)]
    cpar = [perim(c) for c in corners]
    total = 8 * K
    out = []
    if not D.halfedges:
        box = [(K, -K), (K, K), (-K, K), (-K, -K)]
        return [(D.faces[0], _clip([(float(a), float(b)) for a, b in box], float(R)))]
    seen = set()
    for start, h0 in enumerate(D.halfedges):
        if start in seen:
            continue
        pts = []
        j = start
        while j not in seen:
            seen.add(j)
            h = D.halfedges[j]
            nxt = D.halfedges[h.next]
            if h.origin is not None:
                pts.append(D.vertices[h.origin])
            tw = D.halfedges[h.twin]
            if tw.origin is None:
                # leaving to infinity: walk the big box counter-clockwise to the next entry
                e1 = exit_point(D.vertices[h.origin], h.direction)
                back = D.halfedges[nxt.twin]
                q = D.vertices[back.origin]
                e2 = exit_point(q, back.direction)
                s1, s2 = perim(e1), perim(e2)
                span = (s2 - s1) % total
                pts.append(e1)
                for c, sc in sorted(zip(corners, cpar), key=lambda z: (z[1] - s1) % total):
                    if 0 < (sc - s1) % total < span or (span == 0 and s1 != sc):
                        pts.append(c)
                pts.append(e2)
            j = h.next
        face = D.faces[D.halfedges[start].face]
        poly = _clip([(float(a), float(b)) for a, b in pts], float(R))
        if len(poly) >= 3:
            out.append((face, poly))
    return out


class Svg:
    def __init__(self, R: Fraction, size: int = 600):
        self.R = float(R)
        self.size = size
        self.items: list[str] = []
        corners = [project((0, a * self.R, b * self.R)) for a in (-1, 1) for b in (-1, 1)]
        self.xmin = min(c[0] for c in corners)
        self.xmax = max(c[0] for c in corners)
        self.ymin = min(c[1] for c in corners)
        self.ymax = max(c[1] for c in corners)
        self.scale = size / max(self.xmax - self.xmin, self.ymax - self.ymin)

    def xy(self, chart_pt) -> tuple[float, float]:
        px, py = project((0, chart_pt[0], chart_pt[1]))
        return (px - self.xmin) * self.scale, (self.ymax - py) * self.scale

    def polygon(self, pts, fill: str) -> None:
        s = " ".join(f"{x:.3f},{y:.3f}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polygon points="{s}" fill="{fill}" stroke="#555" stroke-width="0.5"/>')

    def polyline(self, pts, width: float = 3, color: str = "#000") -> None:
        s = " ".join(f"{x:.3f},{y:.3f}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polyline points="{s}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def circle(self, p, label: str = "", r: float = 4) -> None:
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r}" fill="#000"/>')
        if label:
            self.items.append(f'<text x="{x + 5:.3f}" y="{y - 5:.3f}" font-size="12">{escape(label)}</text>')

    def text(self) -> str:
        w = (self.xmax - self.xmin) * self.scale
        h = (self.ymax - self.ymin) * self.scale
        body = "\n".join(self.items)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0f}" height="{h:.0f}" '
            f'viewBox="0 0 {w:.3f} {h:.3f}">\n{body}\n</svg>\n'
        )


def _chart(x: TorusPoint) -> tuple:
    return x.coords[1] - x.coords[0], x.coords[2] - x.coords[0]


def _require_plane(S: SiteSet) -> None:
    if S.dim != 2:
        raise PreconditionError("SVG output needs d = 2", S.dim)


def render_diagram(S: SiteSet, diagram, R: Optional[Fraction] = None) -> str:
    """Regions as filled polygons and sites as dots; accepts a VoronoiDiagram or a Dcel."""
    _require_plane(S)
    R = viewport(S) if R is None else Fraction(R)
    svg = Svg(R)
    if hasattr(diagram, "halfedges"):
        for site, poly in dcel_polygons(diagram, R):
            svg.polygon(poly, PALETTE[site % len(PALETTE)])
    else:
        for site, pieces in diagram.regions.items():
            for sp in pieces:
                vs = clipped_vertices(sp.to_hpolyhedron(), R)
                if len(vs) >= 3:
                    svg.polygon([_chart(v) for v in vs], PALETTE[site % len(PALETTE)])
    for k, s in enumerate(S):
        svg.circle(_chart(s), str(k))
    return svg.text()


def render_bisector(S: SiteSet, cells: Sequence, R: Optional[Fraction] = None) -> str:
    """Bisector cells: full-dimensional ones filled, segments as thick polylines, points as dots."""
    _require_plane(S)
    R = viewport(S) if R is None else Fraction(R)
    svg = Svg(R)
    for c in cells:
        vs = clipped_vertices(c.geometry, R)
        if c.dim == 2 and len(vs) >= 3:
            svg.polygon([_chart(v) for v in vs], "#fb8072")
    for c in cells:
        vs = clipped_vertices(c.geometry, R)
        if c.dim == 1 and len(vs) == 2:
            svg.polyline([_chart(v) for v in vs])
        elif c.dim == 0 and c.point is not None:
            svg.circle(_chart(c.point), r=3)
    for k, s in enumerate(S):
        svg.circle(_chart(s), str(k))
    return svg.text()

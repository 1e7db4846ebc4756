"""Brute-force ground truth used to check every fast path.

Nothing here shares code with the diagram builders beyond the distance
formula and the basic types.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Optional, Sequence

from . import _linalg
from .errors import DimensionMismatch, PreconditionError, ZeroVectorError
from .serialize import rat_str
from .trop_core import SiteSet, TorusPoint, all_facets, facet_functional, trop_dist


def nearest_sites(x: TorusPoint, S) -> tuple[Fraction, list[int]]:
    """(minimum distance, indices of all sites attaining it)."""
    sites = list(S)
    if not sites:
        raise PreconditionError("empty site set")
    if any(s.dim != x.dim for s in sites):
        raise DimensionMismatch("dimension mismatch", x)
    # exact in integers: every coordinate times the common denominator L
    L = lcm(*(c.denominator for p in [x, *sites] for c in p.coords))
    X = [c.numerator * (L // c.denominator) for c in x.coords]
    best = None
    idx: list[int] = []
    for k, s in enumerate(sites):
        diff = [xi - c.numerator * (L // c.denominator) for xi, c in zip(X, s.coords)]
        dv = max(diff) - min(diff)
        if best is None or dv < best:
            best, idx = dv, [k]
        elif dv == best:
            idx.append(k)
    return Fraction(best, L), idx


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    count: int = 10_000
    radius: Fraction = Fraction(20)
    max_denominator: int = 997


def sample_points(d: int, cfg: SampleConfig, center: Optional[TorusPoint] = None) -> list[TorusPoint]:
    """Random rational points in a box around ``center`` (reproducible)."""
    rng = random.Random(cfg.seed)
    r = Fraction(cfg.radius)
    c = center.coords if center is not None else (Fraction(0),) * (d + 1)
    out = []
    for _ in range(cfg.count):
        q = rng.randint(1, cfg.max_denominator)
        span = int(r * q)
        coords = [Fraction(0)] + [c[i] - c[0] + Fraction(rng.randint(-span, span), q) for i in range(1, d + 1)]
        out.append(TorusPoint(coords))
    return out


@dataclass
class Violation:
    point: TorusPoint
    claimed: Optional[int]
    nearest: list
    distance: Fraction

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "claimed": self.claimed,
            "nearest": list(self.nearest),
            "distance": rat_str(self.distance),
        }


@dataclass
class VerificationReport:
    samples: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "passed": self.passed,
            "violations": [v.to_json() for v in self.violations],
        }


def _nearest_chunk(args) -> list:
    sites, pts = args
    return [nearest_sites(x, sites) for x in pts]


def _nearest_all(S: SiteSet, points: Sequence[TorusPoint], workers: int) -> list:
    if workers <= 1 or len(points) < 2 * workers:
        return [nearest_sites(x, S) for x in points]
    from concurrent.futures import ProcessPoolExecutor

    step = -(-len(points) // workers)
    chunks = [(list(S), list(points[k:k + step])) for k in range(0, len(points), step)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_nearest_chunk, chunks))  # map keeps chunk order
    return [r for part in parts for r in part]


def verify_diagram(S, D, cfg: SampleConfig = SampleConfig(), points: Optional[Sequence[TorusPoint]] = None,
                   max_violations: int = 100, workers: int = 1) -> VerificationReport:
    """Check that D.locate(x) names a nearest site for every sample x.

    Ties are accepted: any site in the argmin set is a valid owner.  With
    workers > 1 the brute-force side runs in a process pool; the report is
    identical to the sequential one.
    """
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    if points is None:
        points = sample_points(S.dim, cfg, center=_centroid(S))
    rep = VerificationReport(len(points))
    for x, (dist, idx) in zip(points, _nearest_all(S, points, workers)):
        try:
            claimed = D.locate(x)
        except Exception:  # a crashing locator is itself a violation
            claimed = None
        if claimed not in idx:
            rep.violations.append(Violation(x, claimed, idx, dist))
            if len(rep.violations) >= max_violations:
                break
    return rep


def _centroid(S: SiteSet) -> TorusPoint:
    n = len(S)
    return TorusPoint(sum(col) / n for col in zip(*(s.coords for s in S)))


def brute_circumcenters(S) -> list[TorusPoint]:
    """All isolated equidistant points, by solving every facet tuple's square system."""
    S = S if isinstance(S, SiteSet) else SiteSet(S)
    d = S.dim
    if len(S) != d + 1:
        raise PreconditionError("need exactly d+1 sites", len(S), d)
    facets = all_facets(d)
    lams = [facet_functional(F) for F in facets]
    found = set()
    for choice in product(range(len(facets)), repeat=d + 1):
        ls = [lams[c] for c in choice]
        # lambda_i(x) - lambda_0(x) = lambda_i(a_i) - lambda_0(a_0), chart x_1 = 0
        rows, rhs = [], []
        c0 = ls[0].coefficients(d)
        r0 = ls[0](S[0].coords)
        for lam, a in zip(ls[1:], S.sites[1:]):
            c = lam.coefficients(d)
            rows.append([c[j] - c0[j] for j in range(1, d + 1)])
            rhs.append(lam(a.coords) - r0)
        sol = _linalg.solve(rows, rhs)
        if sol is None:
            continue
        x = TorusPoint([Fraction(0)] + sol)
        r = ls[0](tuple(xi - ai for xi, ai in zip(x.coords, S[0].coords)))
        if r <= 0:
            continue
        # cone membership: each functional attains the distance at its site
        if all(trop_dist(x, a) == r and lam(tuple(xi - ai for xi, ai in zip(x.coords, a.coords))) == r
               for lam, a in zip(ls, S)):
            found.add(x)
    return sorted(x for x in found if isolated_equidistant(x, S))


def isolated_equidistant(x: TorusPoint, S) -> bool:
    """No direction v keeps all distances to S equal near x.

    Near x, dist(x + t v, a) = dist(x, a) + t (max of v over the argmax of
    x - a  minus  min of v over its argmin).  For every choice of one argmax
    p_i and one argmin q_i per site, the directions realizing that choice form
    a polyhedral cone; x is isolated iff all these cones are {0}.
    """
    from . import polyhedra as ph

    d = x.dim
    tops, bots = [], []
    for a in S:
        diff = [xi - ai for xi, ai in zip(x.coords, a.coords)]
        hi, lo = max(diff), min(diff)
        tops.append([k + 1 for k in range(d + 1) if diff[k] == hi])
        bots.append([k + 1 for k in range(d + 1) if diff[k] == lo])
    box = [ph.difference(d, i, j, 1) for i in range(1, d + 2) for j in range(1, d + 2) if i != j]
    for ps in product(*tops):
        for qs in product(*bots):
            cons = list(box)
            for k in range(len(ps)):
                cons += [ph.difference(d, t, ps[k], 0) for t in tops[k] if t != ps[k]]
                cons += [ph.difference(d, qs[k], b, 0) for b in bots[k] if b != qs[k]]
                if k:
                    cons.append(ph.eq(ph.quad_coeffs(d, ps[k], qs[k], ps[0], qs[0]), 0))
            P = ph.HPolyhedron(d, cons)
            for i in range(1, d + 2):
                for j in range(1, d + 2):
                    if i != j:
                        best = ph.maximize(P, ph.diff_coeffs(d, {i: 1, j: -1}))
                        if best is not None and best[0] is not None and best[0] > 0:
                            return False
    return True


def pattern_table(v) -> int:
    """Bit (i*m + j) set iff the (F_i, F_j) facet-pair cell of bis(0, v) is non-empty."""
    from .bisect import cell_feasible_two

    vals = v.coords if isinstance(v, TorusPoint) else tuple(Fraction(x) for x in v)
    if max(vals) == min(vals):
        raise ZeroVectorError("zero direction", v)
    d = len(vals) - 1
    facets = all_facets(d)
    m = len(facets)
    bits = 0
    for i, F in enumerate(facets):
        for j, G in enumerate(facets):
            if cell_feasible_two(F, G, vals) is not None:
                bits |= 1 << (i * m + j)
    return bits


def random_site_set(d: int, n: int, seed: int = 0, span: Optional[int] = None, tries: int = 10_000) -> SiteSet:
    """n integer sites in weak general position, reproducible from seed.

    The default coordinate range grows like n^2 so that rejection stays cheap.
    """
    from .trop_core import weak_general_position

    if span is None:
        span = max(20, 2 * n * n)
    if n > (2 * span + 1) ** d:
        raise PreconditionError("span too small for n distinct sites", n, span)
    rng = random.Random(seed)
    for _ in range(tries):
        pts = set()
        while len(pts) < n:
            pts.add((0,) + tuple(rng.randint(-span, span) for _ in range(d)))
        S = SiteSet([TorusPoint(p) for p in sorted(pts)])
        if weak_general_position(S):
            return S
    raise PreconditionError("no site set in weak general position found", d, n, span)

import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropivor import SampleConfig, SiteSet, circumcenters, point, trop_dist, verify_diagram
from tropivor import bisect as bs
from tropivor import oracle
from tropivor import trop_core as tc
from tropivor import voronoi as vo
from tropivor.errors import DimensionMismatch, PreconditionError, ZeroVectorError

CIRC = SiteSet([point(0, 2, 3, 3), point(0, 4, 2, 2), point(2, 4, 1, 1), point(4, 0, 2, 2)])
FIGURE = SiteSet([point(0, 0, 0), point(0, 1, 3), point(0, -3, -1), point(0, -1, -3), point(0, 2, -1)])
V = (Fr(-1), Fr(1), Fr(1, 2))


def test_nearest_sites_examples():
    assert oracle.nearest_sites(CIRC[2], CIRC) == (0, [2])
    assert oracle.nearest_sites(point(0, 0, 1, -1), CIRC) == (4, [0, 1, 2, 3])
    a, b = point(0, 0, 0), point(0, 2, 4)
    m = tc.tropical_segment(a, b)[1]
    assert oracle.nearest_sites(m, SiteSet([a, b]))[1] == [0, 1]


def test_nearest_sites_errors():
    with pytest.raises(PreconditionError):
        oracle.nearest_sites(point(0, 1, 2), [])
    with pytest.raises(DimensionMismatch):
        oracle.nearest_sites(point(0, 1, 2), [point(0, 1, 2, 3)])


@settings(max_examples=200)
@given(st.lists(st.tuples(*[st.fractions(min_value=-9, max_value=9, max_denominator=7)] * 2), min_size=1, max_size=6),
       st.tuples(*[st.fractions(min_value=-9, max_value=9, max_denominator=5)] * 2))
def test_nearest_sites_matches_direct_evaluation(coords, xy):
    S = [point(0, *c) for c in coords]
    x = point(0, *xy)
    dists = [trop_dist(x, s) for s in S]
    assert oracle.nearest_sites(x, S) == (min(dists), [k for k, t in enumerate(dists) if t == min(dists)])


def test_sample_points_reproducible():
    cfg = SampleConfig(seed=7, count=200)
    A = oracle.sample_points(3, cfg)
    assert A == oracle.sample_points(3, cfg)
    assert A != oracle.sample_points(3, SampleConfig(seed=8, count=200))
    assert all(x.dim == 3 and all(abs(c) <= 40 for c in x.coords) for x in A)


class _Flipped:
    """Wraps a diagram and hands one region's points to the next site."""

    def __init__(self, D, site, n):
        self.D, self.site, self.n = D, site, n

    def locate(self, x):
        k = self.D.locate(x)
        return (k + 1) % self.n if k == self.site else k


def test_verify_detects_corruption():
    D = vo.voronoi_standard(FIGURE, allow_degenerate=True)
    assert verify_diagram(FIGURE, D, SampleConfig(count=10_000)).passed
    rep = verify_diagram(FIGURE, _Flipped(D, 0, 5), SampleConfig(count=2000))
    assert not rep.passed
    v = rep.violations[0]
    assert v.claimed not in v.nearest and trop_dist(v.point, FIGURE[v.nearest[0]]) == v.distance


def test_verify_single_site_and_crashing_locator():
    S = SiteSet([point(0, 1, 1)])
    assert verify_diagram(S, vo.voronoi_standard(S), SampleConfig(count=100)).passed

    class Broken:
        def locate(self, x):
            raise RuntimeError

    assert len(verify_diagram(S, Broken(), SampleConfig(count=10)).violations) == 10


def test_parallel_report_identical():
    D = vo.voronoi_standard(FIGURE, allow_degenerate=True)
    cfg = SampleConfig(seed=3, count=400)
    bad = _Flipped(D, 2, 5)
    seq = verify_diagram(FIGURE, bad, cfg).to_json()
    par = verify_diagram(FIGURE, bad, cfg, workers=2).to_json()
    assert seq == par and not seq["passed"]


def test_brute_circumcenters_examples():
    assert oracle.brute_circumcenters(CIRC) == circumcenters(CIRC)
    assert point(0, 0, 1, -1) in oracle.brute_circumcenters(CIRC)
    with pytest.raises(PreconditionError):
        oracle.brute_circumcenters(SiteSet(list(CIRC)[:2]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_brute_circumcenters_plane_triples(seed):
    S = oracle.random_site_set(2, 3, seed=seed, span=8)
    pts = oracle.brute_circumcenters(S)
    assert pts == circumcenters(S)
    if any(not bs.sector(S, a).facets for a in S):
        assert pts == []
    if tc.set_general_position(S):
        assert len(pts) <= 1


def test_isolated_equidistant():
    assert oracle.isolated_equidistant(point(0, 0, 1, -1), CIRC)
    a, b = point(0, 0, 0), point(*V)
    x = bs.bisector_two(a, b)[0].point
    assert not oracle.isolated_equidistant(x, SiteSet([a, b]))


def test_pattern_table_examples():
    t = oracle.pattern_table(V)
    assert t == oracle.pattern_table([Fr(3, 2) * c for c in V])
    assert t != oracle.pattern_table((-1, 1, 0))
    assert len(bs.bisector_two(point(0, 0, 0), point(*V))) == 5
    with pytest.raises(ZeroVectorError):
        oracle.pattern_table((2, 2, 2))


def test_random_site_set():
    S = oracle.random_site_set(3, 6, seed=4)
    assert S == oracle.random_site_set(3, 6, seed=4)
    assert len(S) == 6 and tc.weak_general_position(S)
    with pytest.raises(PreconditionError):
        oracle.random_site_set(1, 10, span=2)


def test_metric_axioms_independent():
    rng = random.Random(0)
    for _ in range(500):
        a, b, c = (point(0, *(Fr(rng.randint(-30, 30), rng.randint(1, 5)) for _ in range(3))) for _ in range(3))
        ab = oracle.nearest_sites(a, [b])[0]
        assert ab == oracle.nearest_sites(b, [a])[0]
        assert oracle.nearest_sites(a, [c])[0] <= ab + oracle.nearest_sites(b, [c])[0]

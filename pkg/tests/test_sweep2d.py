import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropivor import SampleConfig, SiteSet, bisector_two, circumcenters, point, sweep, trop_dist, verify_diagram
from tropivor import bisect as bs
from tropivor import oracle
from tropivor import sweep2d as sw
from tropivor import trop_core as tc
from tropivor.errors import GeneralPositionError, PreconditionError

FIGURE = SiteSet([point(0, 0, 0), point(0, 1, 3), point(0, -3, -1), point(0, -1, -3), point(0, 2, -1)])
rats = st.fractions(min_value=-30, max_value=30, max_denominator=6)


def _line_dist_brute(p, t):
    """min over s of dist(p, (0, t, s)); the optimum sits at a breakpoint of the piecewise-linear objective."""
    u, w = sw.chart(p)
    cands = {w, w - (u - t), w + 1, w - 1}
    return min(trop_dist(p, point(0, t, s)) for s in cands)


# ---------------------------------------------------------------- parabola


@settings(max_examples=200)
@given(rats, rats, st.fractions(min_value=Fr(1, 8), max_value=20, max_denominator=8), st.lists(rats, min_size=5, max_size=5))
def test_parabola_is_equidistant(u, w, h, cs):
    focus = sw.to_point(u, w)
    t = u + h
    P = sw.parabola(focus, t)
    assert len(P.pieces) <= 5
    kinks = [p for a, b, _ in P.pieces for p in (a, b) if p is not None]
    for x in [P.point(c) for c in cs] + kinks:
        assert trop_dist(x, focus) == sw.distance_to_line(x, t) == _line_dist_brute(x, t)


def test_parabola_rejects_unvisited_focus():
    f = point(0, 3, 1)
    with pytest.raises(PreconditionError):
        sw.parabola(f, 3)
    with pytest.raises(PreconditionError):
        sw.parabola(f, 2)
    assert sw.parabola(f, 3, allow_touching=True)
    with pytest.raises(PreconditionError):
        sw.parabola(point(0, 0, 0, 0), 1)


# ---------------------------------------------------------------- diagram structure


def _check_dcel(D, n):
    H = D.halfedges
    for k, h in enumerate(H):
        assert H[h.twin].twin == k and h.twin != k
        assert H[h.next].prev == k and H[h.prev].next == k
        assert H[h.next].face == h.face
    assert sorted(D.faces) == list(range(n))
    assert D.euler_characteristic() == 2


def test_single_site():
    D = sweep(SiteSet([point(0, 1, 2)]))
    assert D.faces == [0] and D.edge_count == 0 and D.vertices == []
    assert D.locate(point(0, 50, -3)) == 0


def test_two_sites_follow_bisector():
    a, b = point(0, 0, 0), point(-1, 1, Fr(1, 2))
    D = sweep(SiteSet([a, b]))
    _check_dcel(D, 2)
    cells = bisector_two(a, b)
    for p, q, d, l, r in D.edges():
        m = sw.to_point(*p) if q is None else sw.to_point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        assert trop_dist(m, a) == trop_dist(m, b)
        assert any(c.geometry.contains(m) for c in cells)


def test_generic_triple_has_one_vertex():
    rng = random.Random(3)
    found = 0
    while found < 10:
        S = oracle.random_site_set(2, 3, seed=rng.randrange(1 << 30), span=10)
        if not tc.set_general_position(S) or bs.predicted_components_3pts(S) is bs.EMPTY_BISECTOR:
            continue
        D = sweep(S)
        assert D.voronoi_vertices() == circumcenters(S)
        found += 1


def test_figure_instance():
    with pytest.raises(GeneralPositionError):
        sweep(FIGURE)
    D = sweep(FIGURE, allow_degenerate=True)
    _check_dcel(D, 5)
    assert verify_diagram(FIGURE, D, SampleConfig(count=10_000)).passed


def test_errors():
    with pytest.raises(PreconditionError):
        sweep(SiteSet([point(0, 0, 0, 0)]))
    with pytest.raises(GeneralPositionError):
        sweep(SiteSet([point(0, 1, 0), point(0, 1, 5)]), allow_degenerate=True)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12))
def test_sweep_invariants(seed, n):
    S = oracle.random_site_set(2, n, seed=seed)

    def check(state):
        ps = [bp.pos(state.t) for bp in state.bps]
        for x, y in zip(ps, ps[1:]):
            assert x <= y
            if x == y:  # only while a circle event at this time is still queued
                assert any(e[0] == state.t and e[1] == sw.CIRCLE for e in state.heap)
        counts = {}
        for a in state.arcs:
            counts[a.site.idx] = counts.get(a.site.idx, 0) + 1
        assert max(counts.values()) <= 2

    D = sweep(S, check=check)
    _check_dcel(D, n)
    assert D.stats.total <= 6 * n
    # conservation: vertices are circumcenters of their defining sites
    for v, sites in D.vertex_sites.items():
        if len(sites) >= 3:
            x = sw.to_point(*D.vertices[v])
            assert len({trop_dist(x, S[i]) for i in sites}) == 1
            if len(sites) == 3:
                assert x in circumcenters(SiteSet([S[i] for i in sites]))
    # edges separate their two sites and lie on their bisector
    for p, q, d, l, r in D.edges():
        m = sw.to_point(*p) if q is None else sw.to_point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        dist, owners = oracle.nearest_sites(m, S)
        assert {l, r} <= set(owners)
    assert verify_diagram(S, D, SampleConfig(seed=seed, count=500)).passed


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=8, unique=True))
def test_plane_general_position_matches_pairwise_test(coords):
    S = SiteSet([point(0, *c) for c in coords])
    assert (sw.plane_general_position(S) is None) == bool(tc.weak_general_position(S))


def test_json_shape():
    D = sweep(oracle.random_site_set(2, 4, seed=2))
    js = D.to_json()
    assert set(js) >= {"vertices", "edges"}
    assert all({"start", "end", "direction", "left", "right"} <= set(e) for e in js["edges"])

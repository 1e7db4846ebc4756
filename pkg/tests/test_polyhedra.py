import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropivor import _pykernels, point
from tropivor import polyhedra as ph
from tropivor.errors import GuardExceeded, PreconditionError

try:
    from tropivor import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def box(d, r):
    return ph.HPolyhedron(d, [ph.difference(d, i, j, r) for i in range(1, d + 2) for j in range(1, d + 2) if i != j])


def test_ball_vertex_counts():
    assert len(ph.Polytrope.ball(2).vertices()) == 6
    assert len(ph.Polytrope.ball(3).vertices()) == 14


def test_ball_contains_and_interior():
    B = ph.Polytrope.ball(2, 2, center=point(0, 1, 1))
    assert B.contains(point(0, 1, 1)) and B.contains(point(0, 3, 2))
    assert not B.contains(point(0, 4, 1))
    x = B.interior_point()
    assert B.contains_interior(x)


def test_feasible_and_strict():
    d = 2
    P = box(d, 1)
    assert P.contains(ph.feasible(P))
    Q = P.add(ph.difference(d, 2, 1, 0), ph.difference(d, 1, 2, 0))  # x2 = x1
    assert ph.feasible(Q) is not None
    assert ph.feasible(Q, strict=True) is None
    R = P.add(ph.difference(d, 2, 1, -3))  # beyond the box
    assert ph.feasible(R) is None


def test_affine_dimension():
    d = 2
    P = box(d, 1)
    assert ph.affine_dimension(P) == 2
    seg = P.add(ph.difference(d, 2, 1, 0), ph.difference(d, 1, 2, 0))
    assert ph.affine_dimension(seg) == 1
    pt = seg.add(ph.difference(d, 3, 1, 0), ph.difference(d, 1, 3, 0))
    assert ph.affine_dimension(pt) == 0
    assert ph.affine_dimension(P.add(ph.difference(d, 2, 1, -5))) == -1


def test_maximize():
    d = 2
    c = ph.diff_coeffs(d, {1: 1, 2: -1})
    sup, x = ph.maximize(box(d, 1), c)
    assert sup == 1 and x.coords[0] - x.coords[1] == 1
    half = ph.HPolyhedron(d, [ph.difference(d, 2, 1, 0)])
    assert ph.maximize(half, c)[0] is None
    with pytest.raises(PreconditionError):
        ph.maximize(box(d, 1), (1, 0, 0))


def test_vertices_guard():
    with pytest.raises(GuardExceeded):
        ph.vertices(box(4, 1))


def test_same_set_and_irredundant():
    d = 2
    P = box(d, 1)
    Q = P.add(ph.difference(d, 1, 2, 5))
    assert ph.same_set(P, Q)
    assert len(ph.irredundant(Q)) == 6


def test_close_detects_negative_cycle():
    c = [[0, -1, None], [-1, 0, None], [None, None, 0]]
    assert ph.polytrope_close(2, c) is None


# ---------------------------------------------------------------- random polytropes


@st.composite
def bound_matrices(draw, d=None):
    d = d or draw(st.integers(1, 3))
    n = d + 1
    c = [[None] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 0
        for j in range(n):
            if i != j and draw(st.booleans()):
                c[i][j] = draw(st.fractions(min_value=-6, max_value=6, max_denominator=3))
    return d, c


@settings(max_examples=150, deadline=None)
@given(bound_matrices())
def test_closure_agrees_with_lp(args):
    d, c = args
    P = ph.polytrope_close(d, c)
    H = ph.HPolyhedron(d, [ph.difference(d, i + 1, j + 1, c[i][j])
                           for i in range(d + 1) for j in range(d + 1) if i != j and c[i][j] is not None])
    if P is None:
        assert ph.feasible(H) is None
        return
    assert ph.feasible(H) is not None
    # closed bounds are tight
    for i in range(d + 1):
        for j in range(d + 1):
            if i != j:
                sup = ph.maximize(H, ph.diff_coeffs(d, {i + 1: 1, j + 1: -1}))[0]
                assert sup == P.c[i][j]
    # closure is idempotent
    assert ph.polytrope_close(d, P.c) == P


@settings(max_examples=100, deadline=None)
@given(bound_matrices(d=2), bound_matrices(d=2))
def test_intersection_matches_h_description(a, b):
    d = 2
    P, Q = ph.polytrope_close(d, a[1]), ph.polytrope_close(d, b[1])
    if P is None or Q is None:
        return
    R = ph.polytrope_intersect(P, Q)
    assert R == ph.polytrope_intersect(Q, P)
    H = P.to_hpolyhedron().intersect(Q.to_hpolyhedron())
    if R is None:
        assert ph.feasible(H) is None
    else:
        assert ph.same_set(R.to_hpolyhedron(), H)


@settings(max_examples=100, deadline=None)
@given(bound_matrices())
def test_interior_point(args):
    d, c = args
    P = ph.polytrope_close(d, c)
    if P is None:
        return
    x = P.interior_point()
    assert (x is not None) == P.is_full_dimensional()
    if x is not None:
        assert P.contains_interior(x)


def test_semi_polytrope_contains_matches_h_description():
    rng = random.Random(3)
    d = 2
    base = ph.Polytrope.ball(d, 5)
    sp = ph.SemiPolytrope(base, (1, 2), {(1, 3): Fr(1), (3, 2): Fr(-1, 2)})
    H = sp.to_hpolyhedron()
    for _ in range(500):
        x = point(0, Fr(rng.randint(-60, 60), 10), Fr(rng.randint(-60, 60), 10))
        assert sp.contains(x) == H.contains(x)


# ---------------------------------------------------------------- kernels


def _random_flat(rng, n):
    inf = _pykernels.INF
    return [0 if i == j else (rng.randint(-5, 9) if rng.random() < 0.7 else inf)
            for i in range(n) for j in range(n)]


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_compiled_kernels_match_python():
    rng = random.Random(11)
    for _ in range(2000):
        n = rng.randint(2, 5)
        m = _random_flat(rng, n)
        b = [rng.randint(-6, 6) for _ in range(n)]
        m1, m2 = list(m), list(m)
        ok1, ok2 = _pykernels.close(m1, n), _ckernels.close(m2, n)
        assert ok1 == ok2
        if not ok1:
            continue
        assert m1 == m2
        assert _pykernels.full_dimensional(m1, n) == _ckernels.full_dimensional(m1, n)
        assert _pykernels.cone_index(m1, n, b) == _ckernels.cone_index(m1, n, b)
        assert _pykernels.split(m1, n, b) == _ckernels.split(m1, n, b)
        sites = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(4)]
        assert _pykernels.trop_dist(b, sites[0]) == _ckernels.trop_dist(b, sites[0])
        assert _pykernels.nearest(b, sites) == _ckernels.nearest(b, sites)

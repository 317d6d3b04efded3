import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsapprox import geometry as geo
from rsapprox.geometry import Frame, GeometryError, Point2, Region, W_L, W_R

INF = math.inf


@st.composite
def regions(draw, max_boxes=3, span=6):
    n = draw(st.integers(1, max_boxes))
    boxes = []
    for _ in range(n):
        u = sorted(draw(st.lists(st.integers(-span, span), min_size=2, max_size=2, unique=True)))
        v = sorted(draw(st.lists(st.integers(-span, span), min_size=2, max_size=2, unique=True)))
        boxes.append((float(u[0]), float(u[1]), float(v[0]), float(v[1])))
    return Region(boxes)


@settings(max_examples=60, deadline=None)
@given(regions())
def test_triple_complement_is_complement(a):
    ca = geo.causal_complement(a)
    assert geo.causal_complement(geo.causal_complement(ca)) == ca


@settings(max_examples=60, deadline=None)
@given(regions(), regions())
def test_complement_reverses_inclusion(a, b):
    big = a | b
    assert geo.causal_complement(big).issubset(geo.causal_complement(a))
    assert a.issubset(geo.causal_completion(a))


@settings(max_examples=60, deadline=None)
@given(regions(), regions())
def test_set_algebra(a, b):
    assert (a & b).issubset(a)
    assert a.issubset(a | b)
    assert (a - b) & b == Region()
    assert ((a - b) | (a & b)) == a


@settings(max_examples=40, deadline=None)
@given(regions())
def test_literal_roundtrip(a):
    assert Region.from_literal(a.to_literal()) == a


def test_diamond_complement_two_wedges():
    d = Region.diamond(Point2(0.0, 0.0), 1.0)
    expected = Region([(-INF, -1.0, 1.0, INF), (1.0, INF, -INF, -1.0)])
    assert geo.causal_complement(d) == expected
    assert geo.causal_completion(d) == d


def test_complement_of_wedges():
    assert geo.causal_complement(W_R) == W_L
    assert geo.causal_complement(W_L) == W_R


def test_complement_points_are_spacelike(rng):
    d = Region.diamond(Point2(0.3, -0.2), 1.5)
    c = geo.causal_complement(d)
    pts = rng.uniform(-8, 8, size=(4000, 2))
    inside_c = c.contains(pts[:, 0], pts[:, 1], eps=0.0)
    corners = np.array([[0.3 - 1.5, -0.2], [0.3 + 1.5, -0.2], [0.3, -0.2 - 1.5], [0.3, -0.2 + 1.5]])
    for p in pts[inside_c]:
        d0 = corners[:, 0] - p[0]
        d1 = corners[:, 1] - p[1]
        assert np.all(d1 * d1 - d0 * d0 > -1e-12)


def test_relate_spacelike_and_timelike():
    a = Region.diamond(Point2(0.0, -3.0), 1.0)
    b = Region.diamond(Point2(0.0, 3.0), 1.0)
    c = Region.diamond(Point2(3.0, -3.0), 1.0)
    assert geo.relate(a, b).spacelike_separated
    assert not geo.relate(a, c).spacelike_separated


def test_literal_rejects_inverted_bounds():
    with pytest.raises(GeometryError):
        Region.from_literal([[1.0, 0.0, 0.0, 1.0]])


def test_literal_infinity_strings():
    r = Region.from_literal([[0, "inf", "-inf", 0]])
    assert r == W_L


def test_frame_roundtrip():
    fr = Frame(Point2(0.4, -1.1), 0.3)
    x0, x1 = np.array([0.1, -2.0, 3.0]), np.array([1.0, 0.5, -0.7])
    y0, y1 = fr.to_frame(x0, x1)
    z0, z1 = fr.from_frame(y0, y1)
    np.testing.assert_allclose(z0, x0, atol=1e-14)
    np.testing.assert_allclose(z1, x1, atol=1e-14)
    o0, o1 = fr.to_frame(fr.origin.x0, fr.origin.x1)
    assert abs(o0) < 1e-14 and abs(o1) < 1e-14


def test_select_frame_places_region_in_left_wedge():
    r = Region.diamond(Point2(0.7, 5.0), 2.0)
    fr = geo.select_frame(r, 0.25)
    assert fr.region_to_frame(r.inflate(0.25)).issubset(W_L)


def test_boost_preserves_null_box_area():
    r = Region([(-2.0, -1.0, 0.5, 3.0)])
    b = r.boost(0.7).bounding_box()
    area = (b.u_hi - b.u_lo) * (b.v_hi - b.v_lo)
    assert area == pytest.approx(2.5, rel=1e-12)

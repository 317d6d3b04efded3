import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dense_profile
from rsapprox.geometry import Box, Frame, Point2, Region
from rsapprox.testfn import (
    AnalyticGaussian,
    CutoffProduct,
    FieldModel,
    GridBump,
    Lattice,
    LatticeError,
    NullBoxBump,
    RapidityGrid,
    Sum,
    TailMassError,
    TemporalStep,
    Zero,
    boost_pullback,
    on_shell_profile,
    plateau_profile,
    reflect,
    smoothstep,
    support_box,
)

THETA = np.linspace(-4, 4, 161)


def _gauss(**kw):
    return AnalyticGaussian(1.0, Point2(0.3, -0.4), 0.6, **kw)


def test_boost_by_zero_is_identity(bump):
    assert boost_pullback(bump, 0.0) is bump


@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_gaussian_boost_shifts_rapidity(eta, c0, c1):
    f = AnalyticGaussian(1.3, Point2(c0, c1), 0.7, k0=0.4, k1=-0.2, phase=0.3)
    c = Point2(0.0, 0.0)
    got = boost_pullback(f, eta, c).lab_profile(THETA, 1.0)
    want = f.lab_profile(THETA - eta, 1.0)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12 * np.max(np.abs(want)))


def test_boost_about_a_point_adds_translation_phase():
    f = _gauss()
    c = Point2(0.5, 1.0)
    eta = 0.8
    g = boost_pullback(f, eta, c)
    # translate to the origin, boost, translate back
    shifted = AnalyticGaussian(1.0, Point2(0.3 - 0.5, -0.4 - 1.0), 0.6)
    inner = boost_pullback(shifted, eta).lab_profile(THETA, 1.0)
    om, kk = np.cosh(THETA), np.sinh(THETA)
    want = inner * np.exp(1j * (om * c.x0 - kk * c.x1))
    np.testing.assert_allclose(g.lab_profile(THETA, 1.0), want, rtol=1e-10, atol=1e-14)


def test_grid_boost_group_law(bump):
    c = Point2(0.0, 0.0)
    two = boost_pullback(boost_pullback(bump, 0.3, c), 0.4, c)
    one = boost_pullback(bump, 0.7, c)
    p2 = two.lab_profile(THETA, 1.0)
    p1 = one.lab_profile(THETA, 1.0)
    scale = np.max(np.abs(p1))
    assert np.max(np.abs(p2 - p1)) / scale < 1e-6


def test_grid_boost_profile_shift(bump):
    g = boost_pullback(bump, 0.5)
    got = g.lab_profile(THETA, 1.0)
    want = bump.lab_profile(THETA - 0.5, 1.0)
    assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-6


@pytest.mark.parametrize("f", [_gauss(k0=0.2, phase=0.4), GridBump.bump(Point2(0.2, -1.0), 0.8, 1.1, 2.0)])
def test_reflection_conjugates_profile(f):
    got = reflect(f).lab_profile(THETA, 1.0)
    want = np.conj(f.lab_profile(THETA, 1.0))
    np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-12 * np.max(np.abs(want)))


def test_grid_reflection_is_involution(bump):
    rr = reflect(reflect(bump, Point2(0.3, 0.1)), Point2(0.3, 0.1))
    np.testing.assert_array_equal(rr.samples, bump.samples)
    assert rr.lattice == bump.lattice


def test_grid_profile_matches_dense_transform():
    f = GridBump.bump(Point2(0.1, -2.0), 0.5, 0.7, 1.0, dt=0.05, dx=0.05)
    L = f.lattice
    th = np.linspace(-3, 3, 25)
    want = dense_profile(f.samples, L.t, L.x, th)
    np.testing.assert_allclose(f.lab_profile(th, 1.0), want, rtol=1e-11, atol=1e-13)


def test_sampled_gaussian_matches_closed_form():
    f = _gauss(k0=0.5, k1=0.3)
    lat = Lattice.covering(-4.5, 5.1, -5.2, 4.4, 0.02, 0.02)
    g = GridBump.sample(f, lat)
    a = f.lab_profile(THETA, 1.0)
    b = g.lab_profile(THETA, 1.0)
    assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-4


def test_gaussian_support_box_half_width():
    s = 0.6
    f = AnalyticGaussian(2.0, Point2(1.0, 0.5), s)
    b = f.support_region().bounding_box()
    half = s * math.sqrt(2.0) * math.sqrt(2.0 * math.log(1e8))
    assert b.u_hi - b.u_lo == pytest.approx(2 * half, rel=1e-12)
    assert b.v_hi - b.v_lo == pytest.approx(2 * half, rel=1e-12)
    assert 0.5 * (b.u_lo + b.u_hi) == pytest.approx(0.5, abs=1e-12)


def test_support_box_of_grid_bump_covers_samples(bump):
    r = bump.support_region()
    T, X = bump.lattice.mesh()
    nz = bump.samples != 0
    # lattice nodes can sit on shared faces of the canonical boxes: test the closure
    assert np.all(r.contains(T[nz], X[nz], eps=-1e-9))
    box = support_box(bump)
    assert r.issubset(box)


def test_boundary_ring_must_vanish():
    lat = Lattice(0.0, 0.1, 5, 0.0, 0.1, 5)
    s = np.zeros((5, 5))
    s[0, 2] = 1.0
    with pytest.raises(LatticeError):
        GridBump(lat, s)


def test_pointwise_evaluation_matches_bump_formula():
    f = GridBump.bump(Point2(0.0, 0.0), 1.0, 1.0, 1.0, dt=0.01, dx=0.01)
    t = np.array([0.123, -0.377, 0.5])
    x = np.array([0.031, 0.444, -0.61])
    want = np.exp(-1 / (1 - t**2)) * np.exp(-1 / (1 - x**2))
    np.testing.assert_allclose(f.evaluate(t, x), want, atol=1e-9)


def test_smoothstep_derivatives_against_finite_differences():
    s = np.linspace(0.05, 0.95, 37)
    h = 1e-5
    v, d1, d2 = smoothstep(s)
    vp, vm = smoothstep(s + h)[0], smoothstep(s - h)[0]
    np.testing.assert_allclose(d1, (vp - vm) / (2 * h), rtol=1e-6, atol=1e-9)
    d1p, d1m = smoothstep(s + h)[1], smoothstep(s - h)[1]
    np.testing.assert_allclose(d2, (d1p - d1m) / (2 * h), rtol=1e-6, atol=1e-7)
    np.testing.assert_array_equal(smoothstep(np.array([-0.2, 0.0, 1.0, 1.3]))[0], [0.0, 0.0, 1.0, 1.0])


def test_smoothstep_symmetry():
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(smoothstep(s)[0] + smoothstep(1 - s)[0], 1.0, atol=1e-15)


@pytest.mark.parametrize("rising", [True, False])
def test_temporal_step_derivatives(rising):
    c = TemporalStep(-0.4, 0.6, rising)
    t = np.linspace(-0.35, 0.55, 19)
    h = 1e-5
    _, d1, d2 = c.derivatives(t)
    np.testing.assert_allclose(d1, (c(t + h) - c(t - h)) / (2 * h), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(d2, (c.derivatives(t + h)[1] - c.derivatives(t - h)[1]) / (2 * h), rtol=1e-6, atol=1e-6)


def test_plateau_profile_values_and_derivative():
    y = np.linspace(-3, 3, 61)
    v, d1, _ = plateau_profile(y, -2.0, -1.0, 1.0, 2.0)
    assert np.all(v[np.abs(y) <= 1.0] == 1.0)
    assert np.all(v[np.abs(y) >= 2.0] == 0.0)
    h = 1e-6
    np.testing.assert_allclose(d1, (plateau_profile(y + h, -2.0, -1.0, 1.0, 2.0)[0] - plateau_profile(y - h, -2.0, -1.0, 1.0, 2.0)[0]) / (2 * h), atol=1e-6)


def test_null_box_bump_support_and_plateau():
    chi = NullBoxBump(Box(-1.0, 1.0, -1.0, 1.0), Box(-2.0, 2.0, -2.0, 2.0))
    assert chi(0.0, 0.0) == 1.0
    assert chi(0.0, 0.95) == 1.0
    assert chi(0.0, 2.01) == 0.0
    assert chi.complement()(0.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        NullBoxBump(Box(-2.0, 2.0, -2.0, 2.0), Box(-1.0, 1.0, -1.0, 1.0))


def test_cutoff_product_support_is_intersection(bump):
    chi = NullBoxBump(Box(-3.0, 3.0, -4.0, -2.5), Box(-3.5, 3.5, -4.5, -2.0))
    g = CutoffProduct(bump, chi)
    assert g.support_region().issubset(Region([chi.support]))
    m = g.materialize()
    T, X = bump.lattice.mesh()
    np.testing.assert_array_equal(m.samples, chi(T, X) * bump.samples)


def test_sum_is_linear(grid):
    a = GridBump.bump(Point2(0.0, -3.0), 1.0, 1.0, 1.0)
    b = _gauss()
    s = Sum((a, Sum((b, Zero()))))
    assert len(s.components) == 3
    np.testing.assert_allclose(s.lab_profile(THETA, 1.0), a.lab_profile(THETA, 1.0) + b.lab_profile(THETA, 1.0), rtol=1e-14)


def test_frame_profile_rule(bump, grid):
    fr = Frame(Point2(0.4, 2.0), 0.3)
    p = on_shell_profile(bump, grid, FieldModel(), fr)
    th = grid.nodes()
    want = bump.lab_profile(th - 0.3, 1.0) * np.exp(1j * (np.cosh(th) * 0.4 - np.sinh(th) * 2.0))
    np.testing.assert_allclose(p.values, want, rtol=1e-12, atol=1e-15)


def test_tail_mass_error_is_actionable(bump):
    with pytest.raises(TailMassError, match="increase theta_max"):
        on_shell_profile(bump, RapidityGrid(2.0, 0.005), FieldModel())


def test_rapidity_grid_weights(grid):
    w = grid.weights()
    assert grid.n == 2201
    assert w.sum() == pytest.approx(2 * grid.theta_max / (4 * math.pi), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-5, 5), st.floats(-5, 5))
def test_boost_matrix_point_action(eta, x0, x1):
    from rsapprox.testfn import boost_matrix

    y = boost_matrix(eta) @ np.array([x0, x1])
    np.testing.assert_allclose(y, [math.cosh(eta) * x0 + math.sinh(eta) * x1, math.cosh(eta) * x1 + math.sinh(eta) * x0], rtol=1e-14, atol=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsapprox import mollifier as mol
from rsapprox.mollifier import Mollifier, eta_grid


def test_peak_value():
    assert Mollifier(0.5).eval(0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_rejects_nonpositive_zeta():
    with pytest.raises(ValueError):
        Mollifier(0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(-3.0, 3.0))
def test_shifted_modulus_identity(zeta, eta):
    # |G(eta - i pi)| = G(eta) exp(pi^2 / (2 zeta))
    G = Mollifier(zeta)
    lhs = abs(G.eval(eta - 1j * math.pi))
    rhs = G.eval(eta) * math.exp(math.pi**2 / (2 * zeta))
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("zeta", [0.5, 0.1, 0.01])
def test_moments(zeta):
    assert mol.moment(zeta, 0) == pytest.approx(1.0, abs=1e-12)
    assert mol.moment(zeta, 2) == pytest.approx(zeta, rel=1e-10)
    assert mol.moment(zeta, 4) == pytest.approx(3 * zeta**2, rel=1e-10)
    assert abs(mol.moment(zeta, 2, "2G-G2")) < 1e-12


def test_grid_half_range_rule():
    g = eta_grid(0.1)
    assert g.half_range >= 8 * math.sqrt(0.2) * (1 - 1e-12)
    with pytest.raises(ValueError):
        eta_grid(0.1, half_range=1.0)


def test_grid_snaps_to_base_step():
    g = eta_grid(0.02, base_step=0.005)
    assert abs(g.step / 0.005 - round(g.step / 0.005)) < 1e-12


def test_single_node_grid_has_unit_weight():
    g = mol.degenerate_grid()
    np.testing.assert_array_equal(g.weights, [1.0])


@pytest.mark.parametrize("zeta", [0.5, 0.1])
@pytest.mark.parametrize("g", [lambda e: np.ones_like(e), lambda e: e**2, np.cos])
def test_convolution_closed_forms(zeta, g):
    assert mol.convolution_residual(zeta, g, eta_grid(zeta)) < 1e-10


def test_delta_limit_with_cos():
    zetas = [0.1, 0.01, 0.001]
    res = mol.delta_limit_residual(zetas, np.cos)
    # int G cos = exp(-zeta/2), so |1 - int G cos| ~ zeta/2
    np.testing.assert_allclose(res, [1 - math.exp(-z / 2) for z in zetas], rtol=1e-8)
    slope = np.polyfit(np.log(zetas), np.log(res), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.02)

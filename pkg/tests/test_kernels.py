import numpy as np
import pytest

from rsapprox import kernels
from rsapprox.kernels import _pykernels

needs_ext = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")


def test_backend_is_known():
    assert kernels.BACKEND in kernels.BACKENDS


def _ndft_case(rng):
    t = np.linspace(-1, 1, 21)
    x = np.linspace(-2, 0, 31)
    s = rng.standard_normal((21, 31))
    th = np.linspace(-3, 3, 17)
    return np.cosh(th), np.sinh(th), t, x, s


def test_ndft2_matches_direct_sum(rng):
    om, kk, t, x, s = _ndft_case(rng)
    got = _pykernels.ndft2(om, kk, t, x, s, np.float64)
    ph = np.exp(1j * (om[:, None, None] * t[None, :, None] - kk[:, None, None] * x[None, None, :]))
    want = np.sum(ph * s[None], axis=(1, 2))
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_lagrange_reproduces_quintic_polynomials():
    t = np.arange(-6, 7) * 0.1
    x = np.arange(-6, 7) * 0.2
    T, X = np.meshgrid(t, x, indexing="ij")
    poly = lambda a, b: 1 + a - 2 * a**3 + a**5 + b**2 - 3 * a * b**4
    qt = np.array([0.013, -0.21, 0.155])
    qx = np.array([0.07, 0.33, -0.41])
    got = _pykernels.lagrange_resample(poly(T, X), t[0], 0.1, x[0], 0.2, qt, qx)
    np.testing.assert_allclose(got, poly(qt, qx), rtol=1e-12, atol=1e-12)


def test_lag_correlation_definition(rng):
    F = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    w = rng.uniform(0, 1, 40)
    got = _pykernels.lag_correlation(F, w, 5)
    for k in range(6):
        want = np.sum(w[: 40 - k] * np.conj(F[: 40 - k]) * F[k:])
        assert abs(got[k] - want) < 1e-12


@needs_ext
def test_backends_agree(rng):
    c = kernels.BACKENDS["cython"]
    om, kk, t, x, s = _ndft_case(rng)
    np.testing.assert_allclose(c.ndft2(om, kk, t, x, s, np.float64), _pykernels.ndft2(om, kk, t, x, s, np.float64), rtol=1e-12, atol=1e-12)
    qt, qx = rng.uniform(-0.5, 0.5, 50), rng.uniform(-1.5, -0.5, 50)
    np.testing.assert_allclose(
        c.lagrange_resample(s, t[0], t[1] - t[0], x[0], x[1] - x[0], qt, qx),
        _pykernels.lagrange_resample(s, t[0], t[1] - t[0], x[0], x[1] - x[0], qt, qx),
        rtol=1e-12,
        atol=1e-12,
    )
    F = rng.standard_normal(60) + 1j * rng.standard_normal(60)
    w = rng.uniform(0, 1, 60)
    np.testing.assert_allclose(c.lag_correlation(F, w, 20), _pykernels.lag_correlation(F, w, 20), rtol=1e-12, atol=1e-12)


@needs_ext
def test_extension_accepts_readonly_arrays(rng):
    c = kernels.BACKENDS["cython"]
    s = rng.standard_normal((9, 9))
    s.setflags(write=False)
    c.lagrange_resample(s, 0.0, 0.1, 0.0, 0.1, np.array([0.4]), np.array([0.4]))


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, RSAPPROX_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "from rsapprox import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

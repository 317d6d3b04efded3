"""Independent reference computations used to freeze expected values.

These avoid the package's rapidity grids and lattice transforms on purpose.
"""

import math

import numpy as np


def adaptive_simpson(fn, a, b, tol=1e-13, max_depth=50):
    """Adaptive Simpson quadrature of a scalar (possibly complex) function."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = fn(a), fn(b), fn(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def gaussian_ft(k, c, sigma, amp=1.0, mass=1.0):
    """Transform of an isotropic unmodulated Gaussian at on-shell momentum k."""
    w = math.sqrt(k * k + mass * mass)
    return amp * 2 * math.pi * sigma**2 * math.exp(-0.5 * sigma**2 * (w * w + k * k)) * complex(math.cos(w * c[0] - k * c[1]), math.sin(w * c[0] - k * c[1]))


def w2_gaussians_k(c1, c2, sigma, mass=1.0, kmax=40.0):
    """W2 of two Gaussians as a momentum integral with measure dk / (4 pi omega)."""

    def integrand(k):
        w = math.sqrt(k * k + mass * mass)
        return (gaussian_ft(k, c1, sigma, mass=mass).conjugate() * gaussian_ft(k, c2, sigma, mass=mass)) / (4 * math.pi * w)

    return adaptive_simpson(integrand, -kmax, kmax)


def dense_profile(samples, t, x, theta, mass=1.0):
    """Lattice transform by a plain dense matrix product (no kernel code)."""
    w = mass * np.cosh(theta)
    k = mass * np.sinh(theta)
    phase = np.exp(1j * (w[:, None, None] * t[None, :, None] - k[:, None, None] * x[None, None, :]))
    return np.tensordot(phase, samples, axes=([1, 2], [0, 1])) * (t[1] - t[0]) * (x[1] - x[0])

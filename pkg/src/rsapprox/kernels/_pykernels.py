"""NumPy reference implementations of the hot kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature; the two must agree to rounding.
"""

import numpy as np

STENCIL = 6  # quintic Lagrange: 6 nodes, offsets -2..3 around floor(s)


def ndft2(omega, kk, t, x, samples, dtype=np.float64):
    """Direct transform ``sum_ij f_ij exp(i(omega t_i - k x_j))`` per node.

    The lattice sum is separable, so each node costs ``Nt*Nx`` multiply-adds
    but only ``Nt + Nx`` complex exponentials.
    """
    omega = np.asarray(omega, dtype=dtype)
    kk = np.asarray(kk, dtype=dtype)
    f = np.asarray(samples, dtype=dtype)
    out = np.empty(omega.shape[0], dtype=np.result_type(dtype, np.complex64))
    t = np.asarray(t, dtype=dtype)
    x = np.asarray(x, dtype=dtype)
    chunk = 256
    for a in range(0, omega.shape[0], chunk):
        et = np.exp(1j * np.multiply.outer(omega[a : a + chunk], t))
        ex = np.exp(-1j * np.multiply.outer(kk[a : a + chunk], x))
        out[a : a + chunk] = np.einsum("ai,ij,aj->a", et, f, ex, optimize=False)
    return out


def lagrange_weights(s):
    """Stencil start index and 6 quintic Lagrange weights at fractional index s."""
    s = np.asarray(s, dtype=float)
    base = np.floor(s).astype(np.int64) - 2
    r = s - base  # in [2, 3)
    w = np.ones(s.shape + (STENCIL,))
    for j in range(STENCIL):
        for m in range(STENCIL):
            if m != j:
                w[..., j] *= (r - m) / (j - m)
    return base, w


def lagrange_resample(samples, t0, dt, x0, dx, qt, qx):
    """Tensor-product quintic interpolation of a lattice function at points.

    Lattice nodes outside the array count as zero.
    """
    f = np.asarray(samples, dtype=float)
    nt, nx = f.shape
    qt = np.asarray(qt, dtype=float)
    qx = np.asarray(qx, dtype=float)
    bt, wt = lagrange_weights((qt - t0) / dt)
    bx, wx = lagrange_weights((qx - x0) / dx)
    out = np.zeros(qt.shape)
    for a in range(STENCIL):
        it = bt + a
        okt = (it >= 0) & (it < nt)
        itc = np.clip(it, 0, nt - 1)
        for b in range(STENCIL):
            ix = bx + b
            ok = okt & (ix >= 0) & (ix < nx)
            ixc = np.clip(ix, 0, nx - 1)
            out += np.where(ok, f[itc, ixc], 0.0) * wt[..., a] * wx[..., b]
    return out


def lag_correlation(F, w, max_lag):
    """``h[k] = sum_n w[n] conj(F[n]) F[n+k]`` for ``k = 0..max_lag``."""
    F = np.asarray(F)
    w = np.asarray(w)
    n = F.shape[0]
    out = np.zeros(max_lag + 1, dtype=F.dtype)
    a = w * np.conj(F)
    for k in range(min(max_lag, n - 1) + 1):
        out[k] = np.dot(a[: n - k], F[k:])
    return out

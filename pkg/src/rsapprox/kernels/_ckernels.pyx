# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, floor
from libc.stdlib cimport malloc, free

cnp.import_array()


def ndft2(omega, kk, t, x, samples, dtype=np.float64):
    if np.dtype(dtype) != np.float64:
        from . import _pykernels
        return _pykernels.ndft2(omega, kk, t, x, samples, dtype=dtype)
    cdef const double[::1] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] kv = np.ascontiguousarray(kk, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] f = np.ascontiguousarray(samples, dtype=np.float64)
    cdef Py_ssize_t n = om.shape[0], nt = f.shape[0], nx = f.shape[1]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double *bre = <double *> malloc(nx * sizeof(double))
    cdef double *bim = <double *> malloc(nx * sizeof(double))
    cdef Py_ssize_t a, i, j
    cdef double sre, sim, are, aim, accre, accim, fij, ph
    try:
        for a in range(n):
            for j in range(nx):
                ph = kv[a] * xv[j]
                bre[j] = cos(ph)
                bim[j] = -sin(ph)
            accre = 0.0
            accim = 0.0
            for i in range(nt):
                sre = 0.0
                sim = 0.0
                for j in range(nx):
                    fij = f[i, j]
                    sre += fij * bre[j]
                    sim += fij * bim[j]
                ph = om[a] * tv[i]
                are = cos(ph)
                aim = sin(ph)
                accre += are * sre - aim * sim
                accim += are * sim + aim * sre
            ov[a] = accre + 1j * accim
    finally:
        free(bre)
        free(bim)
    return out


cdef inline void _weights(double s, Py_ssize_t *base, double *w) noexcept nogil:
    cdef Py_ssize_t b = <Py_ssize_t> floor(s) - 2
    cdef double r = s - b
    cdef int j, m
    for j in range(6):
        w[j] = 1.0
        for m in range(6):
            if m != j:
                w[j] *= (r - m) / (j - m)
    base[0] = b


def lagrange_resample(samples, double t0, double dt, double x0, double dx, qt, qx):
    cdef const double[:, ::1] f = np.ascontiguousarray(samples, dtype=np.float64)
    shape = np.shape(qt)
    cdef const double[::1] qtv = np.ascontiguousarray(np.ravel(qt), dtype=np.float64)
    cdef const double[::1] qxv = np.ascontiguousarray(np.ravel(qx), dtype=np.float64)
    cdef Py_ssize_t m = qtv.shape[0], nt = f.shape[0], nx = f.shape[1]
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double wt[6]
    cdef double wx[6]
    cdef Py_ssize_t bt, bx, p, a, b, it, ix
    cdef double acc, row
    with nogil:
        for p in range(m):
            _weights((qtv[p] - t0) / dt, &bt, wt)
            _weights((qxv[p] - x0) / dx, &bx, wx)
            acc = 0.0
            for a in range(6):
                it = bt + a
                if it < 0 or it >= nt:
                    continue
                row = 0.0
                for b in range(6):
                    ix = bx + b
                    if ix < 0 or ix >= nx:
                        continue
                    row += f[it, ix] * wx[b]
                acc += row * wt[a]
            ov[p] = acc
    return out.reshape(shape)


def lag_correlation(F, w, Py_ssize_t max_lag):
    F = np.asarray(F)
    if F.dtype != np.complex128:
        from . import _pykernels
        return _pykernels.lag_correlation(F, w, max_lag)
    cdef const double complex[::1] fv = np.ascontiguousarray(F)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = fv.shape[0], k, j, top
    out = np.zeros(max_lag + 1, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double re, im, ar, ai, br, bi
    top = max_lag if max_lag < n - 1 else n - 1
    with nogil:
        for k in range(top + 1):
            re = 0.0
            im = 0.0
            for j in range(n - k):
                ar = wv[j] * fv[j].real
                ai = -wv[j] * fv[j].imag
                br = fv[j + k].real
                bi = fv[j + k].imag
                re += ar * br - ai * bi
                im += ar * bi + ai * br
            ov[k] = re + 1j * im
    return out

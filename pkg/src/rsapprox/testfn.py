"""Real test functions on 1+1 Minkowski space and their on-shell profiles.

Conventions (fixed for the whole package):

* metric signature (+, -), coordinates ``(x0, x1) = (t, x)``;
* Fourier kernel ``exp(i(omega t - k x))``;
* mass shell ``omega = m cosh(theta)``, ``k = m sinh(theta)``;
* invariant measure ``dtheta / (4 pi)`` (equivalently ``dk / (2 pi 2 omega)``).

With these, ``boost_pullback(f, eta)`` (the function ``f o boost(-eta)``)
has on-shell profile ``F(theta - eta)`` when the boost centre is the frame
origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import expit

from . import kernels
from .geometry import ORIGIN, Box, Frame, Point2, Region

CONVENTIONS = {
    "signature": "(+,-)",
    "fourier_kernel": "exp(i(omega*t - k*x))",
    "mass_shell": "omega = m cosh(theta), k = m sinh(theta)",
    "measure": "dtheta/(4 pi)",
    "boost_pullback_shift": "profile of f o boost(-eta) about the frame origin is F(theta - eta)",
    "boost_correlation": "h(eta) = W2[f, f o boost(eta)] = int dtheta/(4pi) conj F(theta) F(theta + eta)",
    "pauli_jordan": "E = retarded - advanced; Im W2(f1, f2) = -(1/2) int f1 (E f2)",
}

SUPPORT_EPS = 1e-8


class TailMassError(ValueError):
    """Profile weight outside the central 80% of the rapidity grid is too large."""

    def __init__(self, tail: float, tol: float, theta_max: float):
        self.tail = tail
        self.tol = tol
        super().__init__(
            f"rapidity cutoff theta_max={theta_max:g} too small: tail mass {tail:.3e} > {tol:.1e}; "
            "increase theta_max (and refine the lattice if the shell reaches its alias band)"
        )


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class FieldModel:
    mass: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")


# --------------------------------------------------------------------------
# rapidity grids and profiles


@dataclass(frozen=True)
class RapidityGrid:
    """Uniform symmetric grid ``theta_j = j * step`` for ``|j| <= n_half``."""

    theta_max: float = 5.5
    step: float = 0.005

    @property
    def n_half(self) -> int:
        return int(round(self.theta_max / self.step))

    @property
    def n(self) -> int:
        return 2 * self.n_half + 1

    def nodes(self, dtype=np.float64, pad: int = 0) -> np.ndarray:
        idx = np.arange(-self.n_half - pad, self.n_half + pad + 1)
        return idx.astype(dtype) * dtype(self.step)

    def weights(self, dtype=np.float64) -> np.ndarray:
        w = np.full(self.n, dtype(self.step) / (4 * dtype(np.pi)), dtype=dtype)
        w[0] /= 2
        w[-1] /= 2
        return w


@dataclass(frozen=True, eq=False)
class OnShellProfile:
    grid: RapidityGrid
    values: np.ndarray
    frame: Frame
    tail_mass: float
    pad: int = 0  # extra nodes beyond theta_max on each side

    @property
    def theta(self) -> np.ndarray:
        return self.grid.nodes(self.values.real.dtype.type, self.pad)

    @property
    def core(self) -> np.ndarray:
        """Values on the physical grid ``|theta| <= theta_max``."""
        if self.pad == 0:
            return self.values
        return self.values[self.pad : -self.pad]


# --------------------------------------------------------------------------
# smooth step and cutoffs


def smoothstep(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, with closed-form derivatives.

    Uses ``S(s) = g(s) / (g(s) + g(1-s))`` with ``g(s) = exp(-1/s)``, i.e.
    ``S = expit(1/(1-s) - 1/s)``.  Returns ``(S, S', S'')``.
    """
    s = np.asarray(s, dtype=float)
    val = np.where(s >= 1.0, 1.0, 0.0)
    d1 = np.zeros_like(val)
    d2 = np.zeros_like(val)
    m = (s > 0.0) & (s < 1.0)
    if np.any(m):
        x = s[m]
        S = expit(1.0 / (1.0 - x) - 1.0 / x)
        p = 1.0 / x**2 + 1.0 / (1.0 - x) ** 2
        dp = -2.0 / x**3 + 2.0 / (1.0 - x) ** 3
        val[m] = S
        d1[m] = S * (1 - S) * p
        d2[m] = d1[m] * (1 - 2 * S) * p + S * (1 - S) * dp
    return val, d1, d2


def plateau_profile(y, lo_out, lo_in, hi_in, hi_out):
    """1D bump: 1 on [lo_in, hi_in], 0 outside (lo_out, hi_out); value, d1, d2.

    Infinite outer bounds disable the corresponding edge.
    """
    y = np.asarray(y, dtype=float)
    one = np.ones_like(y)
    zero = np.zeros_like(y)
    if math.isfinite(lo_out):
        w = lo_in - lo_out
        a, a1, a2 = smoothstep((y - lo_out) / w)
        a1, a2 = a1 / w, a2 / w**2
    else:
        a, a1, a2 = one, zero, zero
    if math.isfinite(hi_out):
        w = hi_out - hi_in
        b, b1, b2 = smoothstep((hi_out - y) / w)
        b1, b2 = -b1 / w, b2 / w**2
    else:
        b, b1, b2 = one, zero, zero
    return a * b, a1 * b + a * b1, a2 * b + 2 * a1 * b1 + a * b2


class Cutoff:
    """Smooth function with values in [0, 1]."""

    def __call__(self, t, x) -> np.ndarray:
        raise NotImplementedError

    def complement(self) -> "Cutoff":
        return ComplementCutoff(self)

    def support_region(self) -> Region | None:
        return None


@dataclass(frozen=True)
class TemporalStep(Cutoff):
    """Rises from 0 (t <= t1) to 1 (t >= t2); ``rising=False`` mirrors it."""

    t1: float
    t2: float
    rising: bool = True

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise ValueError("TemporalStep needs t1 < t2")

    def derivatives(self, t):
        w = self.t2 - self.t1
        if self.rising:
            s, d1, d2 = smoothstep((np.asarray(t, dtype=float) - self.t1) / w)
            return s, d1 / w, d2 / w**2
        s, d1, d2 = smoothstep((self.t2 - np.asarray(t, dtype=float)) / w)
        return s, -d1 / w, d2 / w**2

    def __call__(self, t, x=None):
        return self.derivatives(t)[0]


@dataclass(frozen=True)
class NullBoxBump(Cutoff):
    """Spacetime bump: 1 on the plateau box, supported in the support box.

    Product of 1D plateau profiles in ``u = t - x`` and ``v = t + x``.
    """

    plateau: Box
    support: Box

    def __post_init__(self):
        if not self.support.contains_box(self.plateau):
            raise ValueError("plateau must lie inside the support box")
        p, s = self.plateau, self.support
        for outer, inner in ((s.u_lo, p.u_lo), (s.v_lo, p.v_lo)):
            if math.isfinite(outer) and not outer < inner:
                raise ValueError("transition width must be positive")
        for inner, outer in ((p.u_hi, s.u_hi), (p.v_hi, s.v_hi)):
            if math.isfinite(outer) and not inner < outer:
                raise ValueError("transition width must be positive")

    def factors(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        p, s = self.plateau, self.support
        fu = plateau_profile(t - x, s.u_lo, p.u_lo, p.u_hi, s.u_hi)
        fv = plateau_profile(t + x, s.v_lo, p.v_lo, p.v_hi, s.v_hi)
        return fu, fv

    def __call__(self, t, x):
        fu, fv = self.factors(t, x)
        return fu[0] * fv[0]

    def support_region(self) -> Region:
        return Region([self.support])

    def plateau_region(self) -> Region:
        return Region([self.plateau])


@dataclass(frozen=True)
class ComplementCutoff(Cutoff):
    base: Cutoff

    def __call__(self, t, x):
        return 1.0 - self.base(t, x)

    def complement(self) -> Cutoff:
        return self.base


# --------------------------------------------------------------------------
# test functions


def boost_matrix(eta: float) -> np.ndarray:
    """Matrix of boost(eta) acting on column vectors (t, x)."""
    c, s = math.cosh(eta), math.sinh(eta)
    return np.array([[c, s], [s, c]])


class TestFunction:
    """Base class; concrete variants are frozen dataclasses."""

    __test__ = False  # keep pytest from collecting this

    def evaluate(self, t, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t, x):
        return self.evaluate(t, x)

    def lab_profile(self, theta, mass: float, dtype=np.float64) -> np.ndarray:
        raise NotImplementedError

    def pullback(self, M: np.ndarray, center: Point2) -> "TestFunction":
        """``x -> f(M (x - center) + center)``."""
        raise NotImplementedError

    def support_region(self) -> Region:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return Sum((self, other))


@dataclass(frozen=True)
class Zero(TestFunction):
    def evaluate(self, t, x):
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)

    def lab_profile(self, theta, mass, dtype=np.float64):
        return np.zeros(np.shape(theta), dtype=np.result_type(dtype, np.complex64))

    def pullback(self, M, center):
        return self

    def support_region(self):
        return Region()

    @property
    def is_zero(self):
        return True


@dataclass(frozen=True)
class AnalyticGaussian(TestFunction):
    """``A exp(-y.P.y/2) cos(k0 y0 - k1 y1 + phase)`` with ``y = x - center``.

    ``precision`` holds ``(P00, P01, P11)``; by default ``P = I / sigma^2``.
    Boosts and reflections stay in closed form by transforming P, the centre
    and the modulation covector.
    """

    amplitude: float
    center: Point2
    sigma: float
    k0: float = 0.0
    k1: float = 0.0
    phase: float = 0.0
    precision: tuple[float, float, float] | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.precision is None:
            p = 1.0 / self.sigma**2
            object.__setattr__(self, "precision", (p, 0.0, p))

    @property
    def P(self) -> np.ndarray:
        a, b, c = self.precision
        return np.array([[a, b], [b, c]])

    @property
    def q(self) -> np.ndarray:
        # Euclidean covector of the modulation phase k0*y0 - k1*y1
        return np.array([self.k0, -self.k1])

    def evaluate(self, t, x):
        y0 = np.asarray(t, dtype=float) - self.center.x0
        y1 = np.asarray(x, dtype=float) - self.center.x1
        a, b, c = self.precision
        quad = a * y0 * y0 + 2 * b * y0 * y1 + c * y1 * y1
        return self.amplitude * np.exp(-0.5 * quad) * np.cos(self.k0 * y0 - self.k1 * y1 + self.phase)

    def lab_profile(self, theta, mass, dtype=np.float64):
        th = np.asarray(theta, dtype=dtype)
        m = dtype(mass)
        k_t = m * np.cosh(th)
        k_x = -m * np.sinh(th)
        a, b, c = (dtype(v) for v in self.precision)
        det = a * c - b * b
        ia, ib, ic = c / det, -b / det, a / det
        c0, c1 = dtype(self.center.x0), dtype(self.center.x1)
        q0, q1 = dtype(self.k0), dtype(-self.k1)
        ph = dtype(self.phase)
        out = 0
        for sgn in (1, -1):
            y0 = k_t + sgn * q0
            y1 = k_x + sgn * q1
            quad = ia * y0 * y0 + 2 * ib * y0 * y1 + ic * y1 * y1
            out = out + np.exp(sgn * 1j * ph - 0.5 * quad)
        pref = dtype(self.amplitude) * dtype(np.pi) / np.sqrt(det)
        return pref * np.exp(1j * (k_t * c0 + k_x * c1)) * out

    def pullback(self, M, center):
        M = np.asarray(M, dtype=float)
        cb = np.array([center.x0, center.x1])
        cf = np.array([self.center.x0, self.center.x1])
        new_c = cb + np.linalg.solve(M, cf - cb)
        P = M.T @ self.P @ M
        q = M.T @ self.q
        return replace(
            self,
            center=Point2(float(new_c[0]), float(new_c[1])),
            precision=(float(P[0, 0]), float(0.5 * (P[0, 1] + P[1, 0])), float(P[1, 1])),
            k0=float(q[0]),
            k1=float(-q[1]),
        )

    def support_region(self, eps: float = SUPPORT_EPS) -> Region:
        """Effective support ``|f| > eps * A`` (exact null bounding box of the ellipse)."""
        if self.amplitude == 0:
            return Region()
        r2 = 2.0 * math.log(1.0 / eps)
        Pinv = np.linalg.inv(self.P)
        eu = np.array([1.0, -1.0])
        ev = np.array([1.0, 1.0])
        hu = math.sqrt(r2 * eu @ Pinv @ eu)
        hv = math.sqrt(r2 * ev @ Pinv @ ev)
        c = self.center
        return Region([(c.u - hu, c.u + hu, c.v - hv, c.v + hv)])

    @property
    def is_zero(self):
        return self.amplitude == 0


@dataclass(frozen=True)
class Lattice:
    """Uniform spacetime lattice ``t_i = t0 + i dt``, ``x_j = x0 + j dx``."""

    t0: float
    dt: float
    nt: int
    x0: float
    dx: float
    nx: int

    def __post_init__(self):
        if not (self.dt > 0 and self.dx > 0):
            raise LatticeError("lattice spacings must be positive")
        if self.nt < 1 or self.nx < 1:
            raise LatticeError("lattice needs at least one node per axis")

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nt, self.nx)

    def mesh(self):
        return np.meshgrid(self.t, self.x, indexing="ij")

    @classmethod
    def covering(cls, t_lo, t_hi, x_lo, x_hi, dt, dx, pad=3, anchor=(0.0, 0.0)) -> "Lattice":
        """Smallest lattice aligned to ``anchor`` covering the rectangle plus pad cells."""
        i0 = math.floor((t_lo - anchor[0]) / dt + 1e-9) - pad
        i1 = math.ceil((t_hi - anchor[0]) / dt - 1e-9) + pad
        j0 = math.floor((x_lo - anchor[1]) / dx + 1e-9) - pad
        j1 = math.ceil((x_hi - anchor[1]) / dx - 1e-9) + pad
        return cls(anchor[0] + i0 * dt, dt, i1 - i0 + 1, anchor[1] + j0 * dx, dx, j1 - j0 + 1)


MAX_LATTICE_NODES = 8_000_000


def bump1d(s):
    """``exp(-1/(1-s^2))`` on (-1, 1), zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class GridBump(TestFunction):
    """Lattice function; the samples are quadrature data for the profile and
    quintic-Lagrange data for pointwise evaluation.

    The outermost ring of samples must vanish (compact-support certificate).
    """

    lattice: Lattice
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != self.lattice.shape:
            raise LatticeError(f"samples shape {s.shape} != lattice shape {self.lattice.shape}")
        if not np.all(np.isfinite(s)):
            raise LatticeError("non-finite samples")
        if s.size and (np.any(s[0]) or np.any(s[-1]) or np.any(s[:, 0]) or np.any(s[:, -1])):
            raise LatticeError("samples must vanish on the lattice boundary ring")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    # construction -----------------------------------------------------------
    @classmethod
    def from_function(cls, func, t_range, x_range, dt, dx, pad=3, anchor=(0.0, 0.0)) -> "GridBump":
        lat = Lattice.covering(t_range[0], t_range[1], x_range[0], x_range[1], dt, dx, pad, anchor)
        T, X = lat.mesh()
        s = np.asarray(func(T, X), dtype=float)
        s[0] = s[-1] = 0.0
        s[:, 0] = s[:, -1] = 0.0
        return cls(lat, s)

    @classmethod
    def bump(cls, center: Point2, half_t: float, half_x: float, amplitude: float = 1.0, dt=0.02, dx=0.02) -> "GridBump":
        """Product of 1D ``exp(-1/(1-s^2))`` bumps filling the given (t, x) box."""

        def func(T, X):
            return amplitude * bump1d((T - center.x0) / half_t) * bump1d((X - center.x1) / half_x)

        return cls.from_function(
            func, (center.x0 - half_t, center.x0 + half_t), (center.x1 - half_x, center.x1 + half_x), dt, dx
        )

    @classmethod
    def sample(cls, f: TestFunction, lattice: Lattice) -> "GridBump":
        T, X = lattice.mesh()
        s = np.asarray(f.evaluate(T, X), dtype=float)
        s[0] = s[-1] = 0.0
        s[:, 0] = s[:, -1] = 0.0
        return cls(lattice, s)

    # evaluation -------------------------------------------------------------
    def evaluate(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        L = self.lattice
        return kernels.lagrange_resample(self.samples, L.t0, L.dt, L.x0, L.dx, t, x)

    def lab_profile(self, theta, mass, dtype=np.float64):
        th = np.asarray(theta, dtype=dtype)
        m = dtype(mass)
        L = self.lattice
        nz_t = np.flatnonzero(np.any(self.samples != 0, axis=1))
        nz_x = np.flatnonzero(np.any(self.samples != 0, axis=0))
        if nz_t.size == 0:
            return np.zeros(th.shape, dtype=np.result_type(dtype, np.complex64))
        sl_t = slice(nz_t[0], nz_t[-1] + 1)
        sl_x = slice(nz_x[0], nz_x[-1] + 1)
        t = dtype(L.t0) + dtype(L.dt) * np.arange(sl_t.start, sl_t.stop).astype(dtype)
        x = dtype(L.x0) + dtype(L.dx) * np.arange(sl_x.start, sl_x.stop).astype(dtype)
        vals = kernels.ndft2(m * np.cosh(th), m * np.sinh(th), t, x, self.samples[sl_t, sl_x], dtype=dtype)
        return vals * (dtype(L.dt) * dtype(L.dx))

    # geometry ---------------------------------------------------------------
    @property
    def is_zero(self):
        return not np.any(self.samples)

    def support_region(self, chunk: int = 4) -> Region:
        """Union of null boxes around nonzero cells (half-cell dilation).

        Row runs are split into chunks of at most ``chunk`` cells and bounds
        are rounded outward to a quarter-spacing quantum so the union stays
        small enough to canonicalize.
        """
        L = self.lattice
        nz = self.samples != 0
        if not nz.any():
            return Region()
        q = 0.25 * min(L.dt, L.dx)
        boxes = set()
        for i in np.flatnonzero(nz.any(axis=1)):
            row = nz[i]
            idx = np.flatnonzero(row)
            # split into contiguous runs
            breaks = np.flatnonzero(np.diff(idx) > 1)
            starts = np.concatenate(([idx[0]], idx[breaks + 1]))
            stops = np.concatenate((idx[breaks], [idx[-1]]))
            t_lo = L.t0 + (i - 0.5) * L.dt
            t_hi = L.t0 + (i + 0.5) * L.dt
            for a, b in zip(starts, stops):
                for c0 in range(a, b + 1, chunk):
                    c1 = min(c0 + chunk - 1, b)
                    x_lo = L.x0 + (c0 - 0.5) * L.dx
                    x_hi = L.x0 + (c1 + 0.5) * L.dx
                    boxes.add(
                        (
                            _q_floor(t_lo - x_hi, q),
                            _q_ceil(t_hi - x_lo, q),
                            _q_floor(t_lo + x_lo, q),
                            _q_ceil(t_hi + x_hi, q),
                        )
                    )
        return Region(sorted(boxes))

    def pullback(self, M, center):
        M = np.asarray(M, dtype=float)
        L = self.lattice
        if np.allclose(M, -np.eye(2), rtol=0, atol=0):
            return self._reflect(center)
        if self.is_zero:
            return self
        # image of the nonzero cells dilated by the interpolation stencil reach
        nz = self.samples != 0
        it = np.flatnonzero(nz.any(axis=1))
        ix = np.flatnonzero(nz.any(axis=0))
        reach = 3
        corners = np.array(
            [
                [L.t0 + (it[0] - reach) * L.dt, L.x0 + (ix[0] - reach) * L.dx],
                [L.t0 + (it[0] - reach) * L.dt, L.x0 + (ix[-1] + reach) * L.dx],
                [L.t0 + (it[-1] + reach) * L.dt, L.x0 + (ix[0] - reach) * L.dx],
                [L.t0 + (it[-1] + reach) * L.dt, L.x0 + (ix[-1] + reach) * L.dx],
            ]
        )
        c = np.array([center.x0, center.x1])
        Minv = np.linalg.inv(M)
        img = (corners - c) @ Minv.T + c
        new = Lattice.covering(
            img[:, 0].min(), img[:, 0].max(), img[:, 1].min(), img[:, 1].max(), L.dt, L.dx, pad=1, anchor=(L.t0, L.x0)
        )
        if new.nt * new.nx > MAX_LATTICE_NODES:
            raise LatticeError(
                f"resampled lattice needs {new.nt}x{new.nx} nodes covering t in [{img[:, 0].min():.3f}, "
                f"{img[:, 0].max():.3f}], x in [{img[:, 1].min():.3f}, {img[:, 1].max():.3f}] "
                f"(limit {MAX_LATTICE_NODES})"
            )
        T, X = new.mesh()
        pre_t = M[0, 0] * (T - c[0]) + M[0, 1] * (X - c[1]) + c[0]
        pre_x = M[1, 0] * (T - c[0]) + M[1, 1] * (X - c[1]) + c[1]
        s = kernels.lagrange_resample(self.samples, L.t0, L.dt, L.x0, L.dx, pre_t, pre_x)
        s[0] = s[-1] = 0.0
        s[:, 0] = s[:, -1] = 0.0
        return GridBump(new, s)

    def _reflect(self, center: Point2) -> "GridBump":
        L = self.lattice
        t_last = L.t0 + (L.nt - 1) * L.dt
        x_last = L.x0 + (L.nx - 1) * L.dx
        new = replace(L, t0=2 * center.x0 - t_last, x0=2 * center.x1 - x_last)
        return GridBump(new, self.samples[::-1, ::-1].copy())


def _q_floor(v, q):
    return math.floor(v / q + 1e-9) * q


def _q_ceil(v, q):
    return math.ceil(v / q - 1e-9) * q


@dataclass(frozen=True)
class Sum(TestFunction):
    components: tuple[TestFunction, ...]

    def __post_init__(self):
        flat = []
        for c in self.components:
            flat.extend(c.components if isinstance(c, Sum) else (c,))
        object.__setattr__(self, "components", tuple(flat))

    def evaluate(self, t, x):
        out = 0.0
        for c in self.components:
            out = out + c.evaluate(t, x)
        return np.asarray(out, dtype=float) * np.ones(np.broadcast(np.asarray(t), np.asarray(x)).shape)

    def lab_profile(self, theta, mass, dtype=np.float64):
        out = np.zeros(np.shape(theta), dtype=np.result_type(dtype, np.complex64))
        for c in self.components:
            out = out + c.lab_profile(theta, mass, dtype)
        return out

    def pullback(self, M, center):
        return Sum(tuple(c.pullback(M, center) for c in self.components))

    def support_region(self):
        out = Region()
        for c in self.components:
            out = out | c.support_region()
        return out

    @property
    def is_zero(self):
        return all(c.is_zero for c in self.components)


@dataclass(frozen=True)
class CutoffProduct(TestFunction):
    """Pointwise product ``cutoff * base``; materialized on the base lattice."""

    base: TestFunction
    cutoff: Cutoff

    def evaluate(self, t, x):
        return self.cutoff(t, x) * self.base.evaluate(t, x)

    def materialize(self) -> TestFunction:
        b = self.base
        if isinstance(b, GridBump):
            T, X = b.lattice.mesh()
            return GridBump(b.lattice, self.cutoff(T, X) * b.samples)
        if isinstance(b, Sum):
            return Sum(tuple(CutoffProduct(c, self.cutoff).materialize() for c in b.components))
        if isinstance(b, CutoffProduct):
            return CutoffProduct(b.materialize(), self.cutoff).materialize()
        if isinstance(b, Zero):
            return b
        raise LatticeError("cutoff products need a lattice base (sample the analytic function first)")

    def lab_profile(self, theta, mass, dtype=np.float64):
        return self.materialize().lab_profile(theta, mass, dtype)

    def pullback(self, M, center):
        return self.materialize().pullback(M, center)

    def support_region(self):
        base = self.materialize().support_region()
        cut = self.cutoff.support_region()
        return base if cut is None else base & cut

    @property
    def is_zero(self):
        return self.materialize().is_zero


# --------------------------------------------------------------------------
# operations


def boost_pullback(f: TestFunction, eta: float, center: Point2 = ORIGIN) -> TestFunction:
    """``x -> f(boost(-eta)(x - center) + center)``."""
    if eta == 0.0:
        return f
    return f.pullback(boost_matrix(-eta), center)


def reflect(f: TestFunction, center: Point2 = ORIGIN) -> TestFunction:
    """``x -> f(J(x - center) + center)`` with ``J(x0, x1) = (-x0, -x1)``."""
    return f.pullback(-np.eye(2), center)


def apply_cutoff(f: TestFunction, c: Cutoff) -> TestFunction:
    return CutoffProduct(f, c)


def support_box(f: TestFunction) -> Region:
    r = f.support_region()
    if r.is_empty:
        return r
    return Region([r.bounding_box()])


def support_region(f: TestFunction) -> Region:
    return f.support_region()


def on_shell_profile(
    f: TestFunction,
    grid: RapidityGrid,
    model: FieldModel = FieldModel(),
    frame: Frame = Frame(),
    *,
    tail_tol: float = 1e-12,
    pad: int = 0,
    extended: bool = False,
    check_tail: bool = True,
) -> OnShellProfile:
    """On-shell profile ``F(theta)`` of ``f`` in frame coordinates.

    With ``x' = boost(rho) x + a`` the frame profile is
    ``exp(i(omega a0 - k a1)) F_lab(theta - rho)``.  ``pad`` adds nodes beyond
    the cutoff on both sides; ``extended`` evaluates in long double.
    """
    dtype = np.longdouble if extended else np.float64
    th = grid.nodes(dtype, pad)
    m = dtype(model.mass)
    a0, a1 = dtype(frame.translation.x0), dtype(frame.translation.x1)
    vals = f.lab_profile(th - dtype(frame.rapidity_offset), model.mass, dtype)
    if a0 != 0 or a1 != 0:
        vals = vals * np.exp(1j * (m * np.cosh(th) * a0 - m * np.sinh(th) * a1))
    core = vals[pad : len(vals) - pad] if pad else vals
    w = grid.weights(np.float64)
    mass2 = w * np.abs(core.astype(np.complex128)) ** 2
    total = float(mass2.sum())
    theta = grid.nodes(np.float64)
    outer = np.abs(theta) > 0.8 * grid.theta_max
    tail = float(mass2[outer].sum() / total) if total > 0 else 0.0
    if check_tail and tail > tail_tol:
        raise TailMassError(tail, tail_tol, grid.theta_max)
    return OnShellProfile(grid, vals, frame, tail, pad)

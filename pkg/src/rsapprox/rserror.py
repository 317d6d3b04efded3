"""Approximating a coherent state by right-wedge operators acting on the vacuum.

All quantities reduce to the boost correlation ``h`` of ``f`` about the
working frame's origin:

* overlap ``<f | A_zeta 0> = int G_zeta(eta) exp{h(eta) - h(0)}``
* norm^2  ``||A_zeta 0||^2 = int G_2zeta(eta) exp{h(eta) - h(0)}``
* error   ``E^2 = 1 - int [2 G_zeta - G_2zeta] exp{h - h(0)}``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .geometry import W_R, W_L, Frame, Region, relate
from .mollifier import TAIL_SIGMAS, EtaGrid, Mollifier, degenerate_grid, eta_grid
from .qft import DEFAULT_GRID, correlation_from_profile
from .testfn import (
    AnalyticGaussian,
    FieldModel,
    GridBump,
    OnShellProfile,
    RapidityGrid,
    TestFunction,
    boost_pullback,
    on_shell_profile,
    reflect,
)

CLAMP_WINDOW = 1e-10
IMAG_TOL = 1e-10


class QuadratureError(ArithmeticError):
    pass


class SupportError(ValueError):
    pass


def _is_exact(f: TestFunction) -> bool:
    """Compact support is certified only for lattice-based inputs."""
    if isinstance(f, AnalyticGaussian):
        return False
    comps = getattr(f, "components", None)
    if comps is not None:
        return all(_is_exact(c) for c in comps)
    base = getattr(f, "base", None)
    if base is not None:
        return _is_exact(base)
    return True


class WedgeEngine:
    """Caches the frame profile of ``f`` and its boost correlation."""

    def __init__(
        self,
        f: TestFunction,
        grid: RapidityGrid = DEFAULT_GRID,
        model: FieldModel = FieldModel(),
        frame: Frame = Frame(),
        *,
        tail_tol: float = 1e-12,
    ):
        self.f = f
        self.grid = grid
        self.model = model
        self.frame = frame
        self.tail_tol = tail_tol
        self.profile = on_shell_profile(f, grid, model, frame, tail_tol=tail_tol)
        self._h = correlation_from_profile(self.profile, grid.n - 1)
        self.h0 = float(self._h[0].real)

    @property
    def is_zero(self) -> bool:
        return self.h0 == 0.0 and not np.any(self.profile.core)

    def h(self, lags) -> np.ndarray:
        """``h`` at integer rapidity lags; ``h(-k) = conj h(k)`` exactly."""
        lags = np.asarray(lags)
        a = np.abs(lags)
        out = np.zeros(lags.shape, dtype=np.complex128)
        ok = a < len(self._h)
        vals = self._h[a[ok]]
        out[ok] = np.where(lags[ok] < 0, np.conj(vals), vals)
        return out

    def expo(self, lags) -> np.ndarray:
        """``exp{h - h(0)}`` at the given lags."""
        return np.exp(self.h(lags) - self.h0)

    def stride(self, egrid: EtaGrid) -> int:
        s = egrid.step / self.grid.step
        k = int(round(s))
        if k < 1 or abs(s - k) > 1e-9:
            raise QuadratureError("eta step must be an integer multiple of the rapidity step")
        return k

    def eta_grid(self, zeta: float, *, wide: bool = False) -> EtaGrid:
        L = TAIL_SIGMAS * math.sqrt((4 if wide else 2) * zeta)
        return eta_grid(zeta, base_step=self.grid.step, half_range=L)

    def support(self) -> Region:
        return self.frame.region_to_frame(self.f.support_region())


# ---------------------------------------------------------------------------
# vacuum action


def _engine(f, engine, kw) -> WedgeEngine:
    if engine is not None:
        return engine
    return WedgeEngine(f, **kw)


def _weighted(eng: WedgeEngine, weight, egrid: EtaGrid) -> complex:
    s = eng.stride(egrid)
    vals = egrid.weights * weight(egrid.nodes) * eng.expo(egrid.lags * s)
    return complex(np.sum(vals))


def vacuum_overlap(f=None, zeta: float = 0.1, *, engine: WedgeEngine | None = None, egrid: EtaGrid | None = None, **kw) -> complex:
    """``<f | A_zeta 0>``; the imaginary part is a symmetry residue."""
    eng = _engine(f, engine, kw)
    egrid = egrid or eng.eta_grid(zeta, wide=True)
    return _weighted(eng, Mollifier(zeta), egrid)


def vacuum_norm(f=None, zeta: float = 0.1, *, engine: WedgeEngine | None = None, egrid: EtaGrid | None = None, **kw) -> float:
    eng = _engine(f, engine, kw)
    egrid = egrid or eng.eta_grid(zeta, wide=True)
    n2 = _weighted(eng, Mollifier(2 * zeta), egrid)
    if abs(n2.imag) > IMAG_TOL:
        raise QuadratureError(f"norm^2 imaginary residue {n2.imag:.3e}")
    if n2.real < -CLAMP_WINDOW:
        raise QuadratureError(f"negative norm^2 {n2.real:.3e}: quadrature failure")
    return math.sqrt(max(n2.real, 0.0))


@dataclass(frozen=True)
class ErrorParts:
    error: float
    radicand: complex
    overlap: complex
    norm2: complex
    egrid: EtaGrid

    @property
    def imag_residue(self) -> float:
        return max(abs(self.overlap.imag), abs(self.norm2.imag), abs(self.radicand.imag))


def _clamped_sqrt(rad: complex) -> float:
    if abs(rad.imag) > IMAG_TOL:
        raise QuadratureError(f"radicand imaginary residue {rad.imag:.3e}")
    if rad.real < -CLAMP_WINDOW:
        raise QuadratureError(f"radicand {rad.real:.3e} below the clamping window: quadrature failure")
    return math.sqrt(max(rad.real, 0.0))


def error_parts(f=None, zeta: float = 0.1, *, engine: WedgeEngine | None = None, egrid: EtaGrid | None = None, **kw) -> ErrorParts:
    eng = _engine(f, engine, kw)
    egrid = egrid or eng.eta_grid(zeta, wide=True)
    s = eng.stride(egrid)
    e = eng.expo(egrid.lags * s)
    m = Mollifier(zeta)
    g1 = m(egrid.nodes)
    g2 = m.doubled()(egrid.nodes)
    w = egrid.weights
    overlap = complex(np.sum(w * g1 * e))
    norm2 = complex(np.sum(w * g2 * e))
    rad = 1.0 - complex(np.sum(w * (2 * g1 - g2) * e))
    return ErrorParts(_clamped_sqrt(rad), rad, overlap, norm2, egrid)


def error_exact(f=None, zeta: float = 0.1, **kw) -> float:
    """``E_zeta = sqrt(1 - int [2 G_zeta - G_2zeta] exp{h - h(0)})``."""
    return error_parts(f, zeta, **kw).error


def error_oracle(f=None, zeta: float = 0.1, *, engine: WedgeEngine | None = None, egrid: EtaGrid | None = None, return_terms: bool = False, **kw):
    """Brute-force double quadrature of ``<(1 - A) f | (1 - A) f>``.

    Expands into the four terms delta-delta, delta-G, G-delta and G-G and
    evaluates them directly from the boost correlation without the
    convolution identity.
    """
    eng = _engine(f, engine, kw)
    egrid = egrid or eng.eta_grid(zeta)
    s = eng.stride(egrid)
    k = egrid.lags
    wG = egrid.weights * Mollifier(zeta)(egrid.nodes)
    dd = 1.0
    dG = complex(np.sum(wG * eng.expo(-k * s)))  # <f | f o boost(-eta')>
    Gd = complex(np.sum(wG * eng.expo(k * s)))
    GG = complex(np.sum(np.outer(wG, wG) * eng.expo((k[:, None] - k[None, :]) * s)))
    rad = dd - dG - Gd + GG
    val = _clamped_sqrt(rad)
    if return_terms:
        return val, {"dd": dd, "dG": dG, "Gd": Gd, "GG": GG}
    return val


# ---------------------------------------------------------------------------
# approximant descriptor


@dataclass(frozen=True, eq=False)
class ApproximantDescriptor:
    """Quadrature form of the right-wedge approximant.

    Node ``i`` carries weight ``w_i = d eta * G_zeta(eta_i - i pi)`` and the
    generator ``g_i = f o J o boost(-eta_i)`` about the wedge edge.
    """

    f: TestFunction
    zeta: float
    egrid: EtaGrid
    weights: np.ndarray
    frame: Frame
    certificate: Region
    exact: bool

    @property
    def nodes(self) -> np.ndarray:
        return self.egrid.nodes

    @property
    def weight_l1(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def node_function(self, i: int) -> TestFunction:
        c = self.frame.origin
        return boost_pullback(reflect(self.f, c), float(self.nodes[i]), c)


def _complex_weights(zeta: float, egrid: EtaGrid, dtype=np.float64) -> np.ndarray:
    if egrid.n_half == 0:
        return np.ones(1, dtype=np.result_type(dtype, np.complex64))
    eta = egrid.lags.astype(dtype) * dtype(egrid.step)
    w = np.full(eta.shape, dtype(egrid.step))
    w[0] /= 2
    w[-1] /= 2
    return w * Mollifier(zeta).eval(eta - 1j * dtype(np.pi), dtype=dtype)


def build_approximant(
    f: TestFunction,
    zeta: float,
    egrid: EtaGrid | None = None,
    frame: Frame = Frame(),
    model: FieldModel = FieldModel(),
    grid: RapidityGrid = DEFAULT_GRID,
) -> ApproximantDescriptor:
    """Descriptor for ``A_zeta(f)``; requires ``supp f`` inside the left wedge."""
    supp = frame.region_to_frame(f.support_region())
    if not supp.issubset(W_L):
        raise SupportError(f"support {supp.to_literal()} is not inside the left wedge of the frame")
    if egrid is None:
        egrid = eta_grid(zeta, base_step=grid.step)
    if supp.is_empty:
        cert = Region()
    else:
        b = supp.reflect().bounding_box()
        lo, hi = float(egrid.nodes[0]), float(egrid.nodes[-1])
        cert = Region.empty_region()
        for eta in (lo, hi):
            cert = cert | Region([b]).boost(eta)
        # hull of all boosted images: u shrinks/grows monotonically in eta
        bb = cert.bounding_box()
        cert = Region([bb])
    if not cert.issubset(W_R):
        raise SupportError("boosted reflected supports leave the right wedge")
    return ApproximantDescriptor(f, zeta, egrid, _complex_weights(zeta, egrid), frame, cert, _is_exact(f))


# ---------------------------------------------------------------------------
# contour shift


def contour_shift_residual(
    f: TestFunction,
    probe: TestFunction | None = None,
    zeta: float = 0.2,
    *,
    frame: Frame = Frame(),
    model: FieldModel = FieldModel(),
    grid: RapidityGrid = DEFAULT_GRID,
    eta_step: float = 0.01,
    return_sides: bool = False,
):
    """``|sum_i w_i <g|g_i> - int G_zeta(eta) <g | f o boost(-eta)>|`` in long double.

    The left side pairs the probe with the reflected-then-boosted generators
    of the descriptor; the right side with the boosted original.  The weights
    grow like ``exp(pi^2 / 2 zeta)``, so the coherent pairings are evaluated
    in extended precision on a profile computed directly beyond the cutoff.
    """
    probe = f if probe is None else probe
    desc = build_approximant(f, zeta, eta_grid(zeta, base_step=grid.step, step=eta_step), frame, model, grid)
    egrid = desc.egrid
    stride = int(round(egrid.step / grid.step))
    pad = egrid.n_half * stride
    LD = np.longdouble
    Fx = on_shell_profile(f, grid, model, frame, pad=pad, extended=True, check_tail=False).values
    F = Fx[pad : pad + grid.n]
    Gp = on_shell_profile(probe, grid, model, frame, extended=True, tail_tol=1e-10).values
    w = grid.weights(LD)
    hf = np.sum(w * np.abs(F) ** 2)
    hg = np.sum(w * np.abs(Gp) ** 2)
    wts = _complex_weights(zeta, egrid, LD)
    wr = np.full(egrid.n_nodes, LD(egrid.step))
    wr[0] /= 2
    wr[-1] /= 2
    Gr = Mollifier(zeta).eval(egrid.lags.astype(LD) * LD(egrid.step), dtype=LD)
    left = LD(0) * 1j
    right = LD(0) * 1j
    cg = np.conj(Gp)
    for k, j in enumerate(egrid.lags * stride):
        Fs = Fx[pad - j : pad - j + grid.n]  # F(theta - eta)
        ex_l = np.sum(w * cg * np.conj(Fs)) - hg / 2 - hf / 2
        ex_r = np.sum(w * cg * Fs) - hg / 2 - hf / 2
        left += wts[k] * np.exp(ex_l)
        right += wr[k] * Gr[k] * np.exp(ex_r)
    res = float(abs(left - right))
    if return_sides:
        return res, complex(left), complex(right)
    return res


# ---------------------------------------------------------------------------
# sweeps

CSV_COLUMNS = ("zeta", "error", "overlap_re", "norm", "imag_residue", "L", "n_nodes")


@dataclass(frozen=True)
class SweepRow:
    zeta: float
    error: float
    overlap_re: float
    norm: float
    imag_residue: float
    L: float
    n_nodes: int
    failure: str | None = None

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    ci_low: float
    ci_high: float
    n_points: int
    flagged: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    fit: SlopeFit
    h0: float
    richardson: tuple[float, ...] = field(default=())

    @property
    def failed(self) -> bool:
        return any(r.failure for r in self.rows)

    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])


def _row(h: np.ndarray, h0: float, rstep: float, zeta: float) -> tuple[SweepRow, float]:
    """One sweep row from the positive-lag correlation (pure, picklable)."""
    egrid = eta_grid(zeta, base_step=rstep, half_range=TAIL_SIGMAS * math.sqrt(4 * zeta))
    L, n = egrid.half_range, egrid.n_nodes
    try:
        parts = _parts_from_h(h, h0, rstep, zeta, egrid)
        stride = int(round(egrid.step / rstep))
        if stride > 1:
            finer = egrid.refined() if stride % 2 == 0 else EtaGrid(rstep, egrid.n_half * stride)
            rich = abs(_parts_from_h(h, h0, rstep, zeta, finer).error - parts.error)
        else:
            rich = 0.0
        return SweepRow(zeta, parts.error, parts.overlap.real, math.sqrt(max(parts.norm2.real, 0.0)), parts.imag_residue, L, n), rich
    except QuadratureError as exc:
        return SweepRow(zeta, math.nan, math.nan, math.nan, math.nan, L, n, str(exc)), math.nan


def _parts_from_h(h, h0, rstep, zeta, egrid):
    s = int(round(egrid.step / rstep))
    lags = egrid.lags * s
    a = np.abs(lags)
    hv = np.zeros(lags.shape, dtype=np.complex128)
    ok = a < len(h)
    hv[ok] = np.where(lags[ok] < 0, np.conj(h[a[ok]]), h[a[ok]])
    e = np.exp(hv - h0)
    m = Mollifier(zeta)
    g1 = m(egrid.nodes)
    g2 = m.doubled()(egrid.nodes)
    w = egrid.weights
    overlap = complex(np.sum(w * g1 * e))
    norm2 = complex(np.sum(w * g2 * e))
    rad = 1.0 - complex(np.sum(w * (2 * g1 - g2) * e))
    return ErrorParts(_clamped_sqrt(rad), rad, overlap, norm2, egrid)


def fit_slope(zetas: Sequence[float], errors: Sequence[float], decades: float = 1.0, level: float = 0.95) -> SlopeFit:
    """Least-squares slope of log E against log zeta over the smallest decade."""
    z = np.asarray(zetas, dtype=float)
    e = np.asarray(errors, dtype=float)
    ok = np.isfinite(e) & (e > 0)
    if ok.sum() < 2:
        return SlopeFit(math.nan, math.nan, math.nan, int(ok.sum()), "fewer than two positive errors")
    z, e = z[ok], e[ok]
    sel = z <= z.min() * 10**decades * (1 + 1e-12)
    if sel.sum() < 2:
        return SlopeFit(math.nan, math.nan, math.nan, int(sel.sum()), "smallest decade has fewer than two points")
    x, y = np.log(z[sel]), np.log(e[sel])
    res = stats.linregress(x, y)
    n = len(x)
    if n > 2:
        half = stats.t.ppf(0.5 + level / 2, n - 2) * res.stderr
    else:
        half = math.nan
    return SlopeFit(float(res.slope), float(res.slope - half), float(res.slope + half), n)


def sweep(
    f: TestFunction | None,
    zetas: Sequence[float],
    *,
    engine: WedgeEngine | None = None,
    workers: int = 1,
    **kw,
) -> SweepResult:
    """Rows sorted by decreasing zeta; computed independently per row."""
    zs = sorted((float(z) for z in zetas), reverse=True)
    if any(not z > 0 for z in zs):
        raise ValueError("zeta values must be positive")
    eng = _engine(f, engine, kw)
    h = eng._h
    args = [(h, eng.h0, eng.grid.step, z) for z in zs]
    if workers > 1 and len(zs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            out = list(ex.map(_row_star, args))
    else:
        out = [_row(*a) for a in args]
    rows = tuple(r for r, _ in out)
    rich = tuple(x for _, x in out)
    if all(r.error == 0 for r in rows if not r.failure):
        fit = SlopeFit(math.nan, math.nan, math.nan, 0, "all errors vanish: slope undefined")
    else:
        fit = fit_slope([r.zeta for r in rows], [r.error for r in rows])
    return SweepResult(rows, fit, eng.h0, rich)


def _row_star(a):
    return _row(*a)

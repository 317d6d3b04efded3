"""Gaussian mollifier ``G_zeta`` and uniform quadrature grids in rapidity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

TAIL_SIGMAS = 8.0


@dataclass(frozen=True)
class Mollifier:
    zeta: float

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError("zeta must be positive")

    def eval(self, z, dtype=None):
        """``exp(-z^2 / (2 zeta)) / sqrt(2 pi zeta)`` for real or complex ``z``."""
        z = np.asarray(z)
        if dtype is not None:
            z = z.astype(np.result_type(dtype, z.dtype))
        real = z.real.dtype.type if np.iscomplexobj(z) else z.dtype.type
        if not issubclass(real, np.floating):
            real = np.float64
            z = z.astype(np.float64)
        zeta = real(self.zeta)
        return np.exp(-(z * z) / (2 * zeta)) / np.sqrt(2 * real(np.pi) * zeta)

    __call__ = eval

    def doubled(self) -> "Mollifier":
        return Mollifier(2 * self.zeta)


@dataclass(frozen=True, eq=False)
class EtaGrid:
    """Symmetric uniform grid ``eta_k = k * step`` for ``|k| <= n_half``."""

    step: float
    n_half: int

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(-self.n_half, self.n_half + 1) * self.step

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.n_half, self.n_half + 1)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(2 * self.n_half + 1, self.step)
        if self.n_half > 0:
            w[0] *= 0.5
            w[-1] *= 0.5
        else:
            w[0] = 1.0
        return w

    @property
    def half_range(self) -> float:
        return self.n_half * self.step

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_half + 1

    def refined(self) -> "EtaGrid":
        return EtaGrid(self.step / 2, 2 * self.n_half)


def default_step(zeta: float) -> float:
    return min(math.sqrt(zeta) / 4.0, 0.05)


def eta_grid(zeta: float, *, base_step: float | None = None, step: float | None = None, half_range: float | None = None) -> EtaGrid:
    """Grid resolving ``G_zeta`` with ``L >= 8 sqrt(2 zeta)``.

    With ``base_step`` (the rapidity grid spacing) the step is snapped to an
    integer multiple of it so that grid nodes are exact rapidity lags.
    """
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    target = default_step(zeta) if step is None else step
    if base_step is not None:
        stride = max(1, int(math.floor(target / base_step + 1e-9)))
        target = stride * base_step
    L = TAIL_SIGMAS * math.sqrt(2 * zeta) if half_range is None else half_range
    if L < TAIL_SIGMAS * math.sqrt(2 * zeta) * (1 - 1e-12):
        raise ValueError("half_range below 8 sqrt(2 zeta): Gaussian tail not negligible")
    return EtaGrid(target, int(math.ceil(L / target - 1e-9)))


def degenerate_grid() -> EtaGrid:
    """Single node at eta = 0 carrying unit weight."""
    return EtaGrid(1.0, 0)


def _sample(g, eta):
    return np.asarray(g(eta) if callable(g) else g)


def convolution_residual(zeta: float, g: Callable | np.ndarray, grid: EtaGrid | None = None) -> float:
    """``|sum_ij G(eta_i) G(eta_j) g(eta_i - eta_j) - sum_k G_2zeta(eta_k) g(eta_k)|``.

    ``g`` is a callable or an array sampled at ``k * grid.step`` for
    ``|k| <= 2 * grid.n_half`` (the lag range of the double sum).
    """
    grid = grid or eta_grid(zeta)
    m = Mollifier(zeta)
    K = grid.n_half
    lags = np.arange(-2 * K, 2 * K + 1)
    gs = _sample(g, lags * grid.step)
    if gs.shape != lags.shape:
        raise ValueError(f"g samples must cover lags -{2 * K}..{2 * K}")
    wG = grid.weights * m(grid.nodes)
    idx = grid.lags[:, None] - grid.lags[None, :] + 2 * K
    double = np.sum(wG[:, None] * wG[None, :] * gs[idx])
    wide = EtaGrid(grid.step, 2 * K)
    single = np.sum(wide.weights * m.doubled()(wide.nodes) * gs)
    return float(abs(double - single))


def delta_limit_residual(zetas: Sequence[float], g: Callable) -> np.ndarray:
    """``|int G_zeta g - g(0)|`` for each zeta (trapezoid on the default grid)."""
    out = []
    g0 = complex(np.asarray(g(np.zeros(1)))[0])
    for z in zetas:
        grid = eta_grid(z)
        val = np.sum(grid.weights * Mollifier(z)(grid.nodes) * g(grid.nodes))
        out.append(abs(val - g0))
    return np.array(out)


def moment(zeta: float, power: int, weight: str = "G", grid: EtaGrid | None = None) -> float:
    """``int w(eta) eta^power`` with ``w`` one of ``G`` (G_zeta), ``G2`` (G_2zeta)
    or ``2G-G2``."""
    if grid is None:
        grid = eta_grid(zeta, half_range=TAIL_SIGMAS * math.sqrt(4 * zeta))
    eta = grid.nodes
    m = Mollifier(zeta)
    w = {"G": m(eta), "G2": m.doubled()(eta), "2G-G2": 2 * m(eta) - m.doubled()(eta)}[weight]
    return float(np.sum(grid.weights * w * eta**power))

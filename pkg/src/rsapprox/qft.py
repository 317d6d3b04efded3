"""Free-field coherent-state algebra on the mass shell."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import Frame, Point2
from .testfn import (
    FieldModel,
    OnShellProfile,
    RapidityGrid,
    TestFunction,
    Sum,
    Zero,
    on_shell_profile,
)

DEFAULT_GRID = RapidityGrid()


class GridMismatchError(ValueError):
    pass


def _check_compatible(p1: OnShellProfile, p2: OnShellProfile):
    if p1.grid != p2.grid:
        raise GridMismatchError(f"profiles live on different rapidity grids: {p1.grid} vs {p2.grid}")
    if p1.frame != p2.frame:
        raise GridMismatchError("profiles computed in different frames")


def w2_profiles(p1: OnShellProfile, p2: OnShellProfile) -> complex:
    """``sum_j w_j conj(F1_j) F2_j`` on the shared grid."""
    _check_compatible(p1, p2)
    w = p1.grid.weights(p1.core.real.dtype.type)
    return complex(np.sum(w * np.conj(p1.core) * p2.core))


def _profile(f, grid, model, frame):
    if isinstance(f, OnShellProfile):
        return f
    return on_shell_profile(f, grid, model, frame)


def w2(f1, f2, model: FieldModel = FieldModel(), frame: Frame = Frame(), grid: RapidityGrid = DEFAULT_GRID) -> complex:
    """Smeared Wightman function ``<0|phi(f1) phi(f2)|0>``.

    Accepts test functions or precomputed profiles.
    """
    return w2_profiles(_profile(f1, grid, model, frame), _profile(f2, grid, model, frame))


def coherent_inner(f1, f2, model: FieldModel = FieldModel(), frame: Frame = Frame(), grid: RapidityGrid = DEFAULT_GRID) -> complex:
    """``<W(f1) 0 | W(f2) 0> = exp{W2(f1,f2) - W2(f1,f1)/2 - W2(f2,f2)/2}``."""
    p1 = _profile(f1, grid, model, frame)
    p2 = _profile(f2, grid, model, frame)
    if p1 is p2:
        return 1.0 + 0.0j
    a = w2_profiles(p1, p2)
    n1 = w2_profiles(p1, p1).real
    n2 = w2_profiles(p2, p2).real
    return complex(np.exp(a - 0.5 * n1 - 0.5 * n2))


def weyl_compose(f1: TestFunction, f2: TestFunction, model: FieldModel = FieldModel(), frame: Frame = Frame(), grid: RapidityGrid = DEFAULT_GRID):
    """``W(f1) W(f2) = phase * W(f1 + f2)`` with ``phase = exp{-i Im W2(f1, f2)}``."""
    if f2.is_zero:
        return 1.0 + 0.0j, f1
    if f1.is_zero:
        return 1.0 + 0.0j, f2
    im = w2(f1, f2, model, frame, grid).imag
    return complex(np.exp(-1j * im)), Sum((f1, f2))


@dataclass(frozen=True, eq=False)
class BoostCorrelation:
    """``h(eta_i) = W2[f, f o boost(eta_i)]`` on a symmetric lag grid."""

    eta: np.ndarray
    values: np.ndarray
    h0: float
    profile: OnShellProfile

    def at_lags(self, lags: np.ndarray) -> np.ndarray:
        """Values at integer multiples of the rapidity step (zero beyond the grid)."""
        return _lookup(self._positive, np.asarray(lags))

    @property
    def _positive(self) -> np.ndarray:
        n = (len(self.values) - 1) // 2
        return self.values[n:]


def _lookup(hpos: np.ndarray, lags: np.ndarray) -> np.ndarray:
    a = np.abs(lags)
    out = np.zeros(lags.shape, dtype=hpos.dtype)
    ok = a < len(hpos)
    vals = hpos[a[ok]]
    out[ok] = np.where(lags[ok] < 0, np.conj(vals), vals)
    return out


def correlation_from_profile(profile: OnShellProfile, max_lag: int) -> np.ndarray:
    """``h[k] = sum_j w_j conj(F_j) F_{j+k}`` for ``k = 0..max_lag``; zero-extended profile."""
    F = np.ascontiguousarray(profile.core, dtype=np.complex128)
    w = profile.grid.weights()
    h = kernels.lag_correlation(F, w, max_lag)
    h[0] = h[0].real
    return h


def boost_correlation(
    f,
    eta_grid: np.ndarray,
    center: Point2 | None = None,
    model: FieldModel = FieldModel(),
    frame: Frame = Frame(),
    grid: RapidityGrid = DEFAULT_GRID,
) -> BoostCorrelation:
    """Rapidity-shift correlation of ``f`` with its boosts about the wedge edge.

    ``eta_grid`` must be symmetric and consist of multiples of the rapidity
    step.  The profile is zero beyond the cutoff, which the tail check in
    ``on_shell_profile`` certifies.
    """
    if center is not None:
        o = frame.origin
        if abs(center.x0 - o.x0) > 1e-12 or abs(center.x1 - o.x1) > 1e-12:
            raise ValueError("boost centre must be the frame origin (wedge edge)")
    eta = np.asarray(eta_grid, dtype=float)
    lags = np.rint(eta / grid.step).astype(np.int64)
    if np.any(np.abs(lags * grid.step - eta) > 1e-9 * max(1.0, float(np.abs(eta).max(initial=0)))):
        raise ValueError("eta nodes must be integer multiples of the rapidity step")
    if not np.array_equal(lags, -lags[::-1]):
        raise ValueError("eta grid must be symmetric")
    prof = _profile(f, grid, model, frame)
    max_lag = int(np.abs(lags).max(initial=0))
    hpos = correlation_from_profile(prof, max_lag)
    values = _lookup(hpos, lags)
    return BoostCorrelation(eta, values, float(hpos[0].real), prof)

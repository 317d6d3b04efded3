"""Invariant suites run by ``rsapprox verify``.

Each check records a measured residual next to its tolerance.  Randomized
checks draw from a seeded generator so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry as geo
from . import mollifier as mol
from . import qft, rserror
from .geometry import Frame, Point2, Region
from .testfn import FieldModel, GridBump, RapidityGrid, TestFunction, boost_pullback, on_shell_profile


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    note: str = ""


def _le(name, measured, tol, note=""):
    return Check(name, float(measured), float(tol), bool(measured <= tol), note)


def _ge(name, measured, bound, note=""):
    return Check(name, float(measured), float(bound), bool(measured >= bound), note)


@dataclass
class Context:
    f: TestFunction
    grid: RapidityGrid
    model: FieldModel
    frame: Frame
    tol: object  # config.Tolerances
    rng: np.random.Generator
    trials: int
    contour_zeta: float
    oracle_zetas: list

    _engine: rserror.WedgeEngine | None = None

    @property
    def engine(self) -> rserror.WedgeEngine:
        if self._engine is None:
            self._engine = rserror.WedgeEngine(self.f, self.grid, self.model, self.frame, tail_tol=self.tol.tail)
        return self._engine


def suite_hermiticity(ctx: Context) -> list[Check]:
    eng = ctx.engine
    n = eng.grid.n - 1
    lags = np.arange(-n, n + 1)
    h = eng.h(lags)
    sym = float(np.max(np.abs(h[::-1] - np.conj(h))))
    w = qft.w2(eng.profile, eng.profile)
    scale = max(eng.h0, 1e-300)
    out = [
        _le("h(-eta) = conj h(eta)", sym, ctx.tol.hermiticity),
        _le("h(0) = W2(f,f)", abs(eng.h0 - w.real), ctx.tol.hermiticity),
        _le("Im W2(f,f)", abs(w.imag), ctx.tol.imag),
        _le("|h(eta)| <= h(0)", max(0.0, float(np.max(np.abs(h))) - eng.h0), ctx.tol.hermiticity),
    ]
    if eng.h0 > 0:
        c = ctx.frame.origin
        worst = 0.0
        for eta in (0.3, 1.0):
            k = int(round(eta / ctx.grid.step))
            slow = qft.w2(eng.profile, on_shell_profile(boost_pullback(ctx.f, -k * ctx.grid.step, c), ctx.grid, ctx.model, ctx.frame, tail_tol=1.0))
            worst = max(worst, abs(slow - eng.h([k])[0]) / scale)
        out.append(_le("boost two-path agreement (eta = 0.3, 1.0)", worst, ctx.tol.boost_two_path))
    return out


def _random_bump(rng, t, x, dt=0.02):
    a = rng.uniform(0.8, 1.2, size=2)
    return GridBump.bump(Point2(t, x), a[0], a[1], amplitude=rng.uniform(1, 3), dt=dt, dx=dt), a


def suite_microcausality(ctx: Context) -> list[Check]:
    rng = ctx.rng
    worst = 0.0
    uncertified = 0
    for _ in range(ctx.trials):
        t1, t2 = rng.uniform(-1.0, 1.0, size=2)
        x1 = rng.uniform(-6.0, -3.0)
        f1, a1 = _random_bump(rng, t1, x1)
        gap = a1[1] + 1.2 + abs(t2 - t1) + a1[0] + 1.2 + rng.uniform(0.3, 2.0)
        f2, _ = _random_bump(rng, t2, x1 + gap)
        rel = geo.relate(f1.support_region(), f2.support_region())
        if not rel.spacelike_separated:
            uncertified += 1
            continue
        p1 = on_shell_profile(f1, ctx.grid, ctx.model)
        p2 = on_shell_profile(f2, ctx.grid, ctx.model)
        w = qft.w2(p1, p2)
        scale = math.sqrt(qft.w2(p1, p1).real * qft.w2(p2, p2).real)
        worst = max(worst, abs(w.imag) / scale)
    out = [
        _le("|Im W2| / scale, spacelike pairs", worst, ctx.tol.microcausality),
        _le("random pairs lacking a spacelike certificate", uncertified, 0),
    ]
    # pinned timelike pair: same spatial bump, displaced in time
    g1 = GridBump.bump(Point2(-1.5, 0.0), 1.0, 1.0, 2.0)
    g2 = GridBump.bump(Point2(1.5, 0.0), 1.0, 1.0, 2.0)
    rel = geo.relate(g1.support_region(), g2.support_region())
    p1 = on_shell_profile(g1, ctx.grid, ctx.model)
    p2 = on_shell_profile(g2, ctx.grid, ctx.model)
    w = qft.w2(p1, p2)
    scale = math.sqrt(qft.w2(p1, p1).real * qft.w2(p2, p2).real)
    out.append(_ge("|Im W2| / scale, pinned timelike pair", abs(w.imag) / scale, ctx.tol.microcausality, "must exceed the bound"))
    out.append(_le("timelike pair not certified spacelike", float(rel.spacelike_separated), 0))
    return out


def suite_convolution(ctx: Context) -> list[Check]:
    out = []
    for zeta in (0.5, 0.1):
        grid = mol.eta_grid(zeta)
        out.append(_le(f"g = 1, zeta = {zeta}", mol.convolution_residual(zeta, lambda e: np.ones_like(e), grid), ctx.tol.closed_form))
        out.append(_le(f"g = eta^2, zeta = {zeta}", mol.convolution_residual(zeta, lambda e: e**2, grid), ctx.tol.closed_form))
    eng = ctx.engine
    for zeta in (0.5, 0.1, 0.02):
        g = eng.eta_grid(zeta)
        s = eng.stride(g)
        lags = np.arange(-2 * g.n_half, 2 * g.n_half + 1) * s
        res = mol.convolution_residual(zeta, eng.expo(lags), g)
        out.append(_le(f"g = exp(h - h0), zeta = {zeta}", res, ctx.tol.convolution))
    out.append(_le("moment int G eta^2 - zeta (zeta = 0.1)", abs(mol.moment(0.1, 2) - 0.1), ctx.tol.closed_form))
    out.append(_le("moment int G eta^4 - 3 zeta^2 (zeta = 0.1)", abs(mol.moment(0.1, 4) - 0.03), ctx.tol.closed_form))
    out.append(_le("int (2G - G2) eta^2 (zeta = 0.1)", abs(mol.moment(0.1, 2, "2G-G2")), ctx.tol.closed_form))
    return out


def suite_contour(ctx: Context) -> list[Check]:
    res = rserror.contour_shift_residual(ctx.f, ctx.f, ctx.contour_zeta, frame=ctx.frame, model=ctx.model, grid=ctx.grid)
    return [_le(f"contour shift residual, probe = f, zeta = {ctx.contour_zeta}", res, ctx.tol.contour)]


def suite_oracle(ctx: Context) -> list[Check]:
    eng = ctx.engine
    out = []
    for z in ctx.oracle_zetas:
        parts = rserror.error_parts(zeta=z, engine=eng)
        o = rserror.error_oracle(zeta=z, engine=eng)
        rel = abs(parts.error - o) / max(abs(o), 1e-300) if o != 0 else abs(parts.error)
        out.append(_le(f"error_exact vs error_oracle, zeta = {z}", rel, ctx.tol.oracle_rel))
        ident = abs(parts.error**2 - (1 - 2 * parts.overlap.real + parts.norm2.real))
        out.append(_le(f"E^2 = 1 - 2 Re overlap + norm^2, zeta = {z}", ident, ctx.tol.clamp))
        out.append(_le(f"imaginary residues, zeta = {z}", parts.imag_residue, ctx.tol.imag))
    return out


def random_region(rng: np.random.Generator, n_boxes: int | None = None, span: int = 8) -> Region:
    """Union of boxes with integer corners (exact arithmetic in the checks)."""
    n = int(rng.integers(1, 5)) if n_boxes is None else n_boxes
    boxes = []
    for _ in range(n):
        u = np.sort(rng.choice(np.arange(-span, span + 1), size=2, replace=False))
        v = np.sort(rng.choice(np.arange(-span, span + 1), size=2, replace=False))
        boxes.append((float(u[0]), float(u[1]), float(v[0]), float(v[1])))
    return Region(boxes)


def suite_geometry(ctx: Context) -> list[Check]:
    rng = ctx.rng
    fails = {"involution": 0, "extensivity": 0, "monotonicity": 0}
    for _ in range(100):
        a = random_region(rng)
        b = a | random_region(rng)
        ca = geo.causal_complement(a)
        if geo.causal_complement(geo.causal_complement(ca)) != ca:
            fails["involution"] += 1
        if not a.issubset(geo.causal_completion(a)):
            fails["extensivity"] += 1
        if not geo.causal_complement(b).issubset(ca):
            fails["monotonicity"] += 1
    out = [_le(f"complement {k} failures (100 random unions)", v, 0) for k, v in fails.items()]
    d = Region.diamond(Point2(0.0, 0.0), 1.0)
    expected = Region([(-math.inf, -1.0, 1.0, math.inf), (1.0, math.inf, -math.inf, -1.0)])
    out.append(_le("diamond complement = two wedges", float(geo.causal_complement(d) != expected), 0))
    return out


SUITES = {
    "hermiticity": suite_hermiticity,
    "microcausality": suite_microcausality,
    "convolution": suite_convolution,
    "contour": suite_contour,
    "oracle": suite_oracle,
    "geometry": suite_geometry,
}


def run_suites(ctx: Context, names) -> dict:
    report = {}
    for name in names:
        report[name] = [asdict(c) for c in SUITES[name](ctx)]
    return report

"""Acceptance criteria, one test per criterion at the stated tolerances."""

import math
from pathlib import Path

import numpy as np
import pytest

from conftest import PINNED_ZETAS, bumps_for_oracle, pinned_bump
from rsapprox import geometry as geo
from rsapprox import mollifier as mol
from rsapprox import rserror
from rsapprox.cli import main
from rsapprox.geometry import Frame, Point2, Region
from rsapprox.qft import coherent_inner, w2
from rsapprox.rserror import WedgeEngine, error_exact, error_oracle
from rsapprox.testfn import GridBump, boost_pullback, on_shell_profile
from rsapprox.timeslice import SlabSpec, SpectralLattice, TimesliceParams, general_error, propagate, slab_box
from rsapprox.verify import random_region
from test_timeslice import kg_image

GOLDEN_CFG = str(Path(__file__).parent / "golden" / "pinned.yaml")


def test_c01_oracle_equivalence(grid, model, record):
    worst = 0.0
    for f in bumps_for_oracle():
        eng = WedgeEngine(f, grid, model)
        for z in (0.5, 0.1, 0.02):
            e, o = error_exact(zeta=z, engine=eng), error_oracle(zeta=z, engine=eng)
            worst = max(worst, abs(e - o) / o)
    ok = record(1, "oracle equivalence", worst < 1e-8, f"max rel diff {worst:.2e} < 1e-8 (3 bumps x 3 zetas)")
    assert ok


def test_c02_vanishing_error(engine, record):
    res = rserror.sweep(None, PINNED_ZETAS, engine=engine)
    errs = res.errors()
    decreasing = bool(np.all(np.diff(errs) < 0))
    e3 = next(r.error for r in res.rows if r.zeta == 1e-3)
    slope = res.fit.slope
    ok = decreasing and e3 < 1e-2 and 0.9 <= slope <= 1.1
    detail = f"decreasing={decreasing}, E(1e-3)={e3:.3e} < 1e-2, slope={slope:.4f} in [0.9, 1.1] (CI {res.fit.ci_low:.3f}..{res.fit.ci_high:.3f})"
    assert record(2, "vanishing error", ok, detail)


def test_c03_contour_shift(bump, record):
    res = rserror.contour_shift_residual(bump, bump, 0.2)
    assert record(3, "contour shift", res < 1e-6, f"residual {res:.2e} < 1e-6 (probe = f, zeta = 0.2)")


def test_c04_convolution_identity(engine, record):
    worst_h = 0.0
    for z in (0.5, 0.1, 0.02):
        g = engine.eta_grid(z)
        s = engine.stride(g)
        lags = np.arange(-2 * g.n_half, 2 * g.n_half + 1) * s
        worst_h = max(worst_h, mol.convolution_residual(z, engine.expo(lags), g))
    worst_c = 0.0
    for z in (0.5, 0.1):
        for fn in (lambda e: np.ones_like(e), lambda e: e**2, np.cos):
            worst_c = max(worst_c, mol.convolution_residual(z, fn, mol.eta_grid(z)))
    ok = worst_h < 1e-8 and worst_c < 1e-10
    assert record(4, "convolution identity", ok, f"exp(h - h0): {worst_h:.2e} < 1e-8; closed forms: {worst_c:.2e} < 1e-10")


def test_c05_two_point_structure(engine, bump, grid, model, rng, record):
    n = grid.n - 1
    h = engine.h(np.arange(-n, n + 1))
    herm = float(np.max(np.abs(h[::-1] - np.conj(h))))
    h0_diff = abs(engine.h0 - w2(bump, bump).real)
    two_path = 0.0
    for eta in (0.3, 1.0):
        k = int(round(eta / grid.step))
        slow = w2(engine.profile, on_shell_profile(boost_pullback(bump, -k * grid.step), grid, model, tail_tol=1.0))
        two_path = max(two_path, abs(slow - engine.h([k])[0]) / engine.h0)
    # random certified spacelike pairs
    spacelike = 0.0
    for _ in range(10):
        t1, t2 = rng.uniform(-1, 1, size=2)
        a = GridBump.bump(Point2(t1, -4.0), 1.0, 1.0, rng.uniform(1, 3))
        gap = 2.0 + abs(t2 - t1) + 2.0 + rng.uniform(0.3, 2.0)
        b = GridBump.bump(Point2(t2, -4.0 + gap), 1.0, 1.0, rng.uniform(1, 3))
        assert geo.relate(a.support_region(), b.support_region()).spacelike_separated
        scale = math.sqrt(w2(a, a).real * w2(b, b).real)
        spacelike = max(spacelike, abs(w2(a, b).imag) / scale)
    g1 = GridBump.bump(Point2(-1.5, 0.0), 1.0, 1.0, 2.0)
    g2 = GridBump.bump(Point2(1.5, 0.0), 1.0, 1.0, 2.0)
    timelike = abs(w2(g1, g2).imag) / math.sqrt(w2(g1, g1).real * w2(g2, g2).real)
    ok = h0_diff < 1e-10 and herm < 1e-10 and two_path < 1e-6 and spacelike < 1e-6 and timelike > 1e-6
    detail = (
        f"h0 {h0_diff:.1e}, hermiticity {herm:.1e} (< 1e-10); boost two-path {two_path:.1e} < 1e-6; "
        f"spacelike |Im W2|/scale {spacelike:.1e} < 1e-6; timelike {timelike:.2f} > 1e-6"
    )
    assert record(5, "two-point structure", ok, detail)


def test_c06_time_slice(slab_report, record):
    f, U, rep = slab_report
    p = TimesliceParams()
    inner = coherent_inner(f, rep.f0, grid=p.grid)
    L = rep.f0.lattice
    slab = SlabSpec(rep.slab["t1"], rep.slab["t2"])
    in_slab = rep.f0.support_region().issubset(slab_box(slab, L.x0, L.x0 + (L.nx - 1) * L.dx))
    k, h = kg_image()
    sl = SpectralLattice.around(k.lattice, 12.0)
    sk, sh = propagate(k, sl, window=(-2, 6)), propagate(h, sl, window=(-2, 6))
    kg = max(np.max(np.abs(sk.state(t)[i])) / np.max(np.abs(sh.state(t)[i])) for t in (3.0, 5.0) for i in (0, 1))
    ok = abs(inner - 1) < 1e-6 and in_slab and kg < 1e-6
    detail = f"|<f|f0> - 1| {abs(inner - 1):.1e} < 1e-6; supp f0 in slab box: {in_slab}; KG image late-time residual {kg:.1e} < 1e-6"
    assert record(6, "time slice", ok, detail)


def test_c07_factorization(slab_report, record):
    _, _, rep = slab_report
    a, b, f0 = rep.part_in, rep.part_out, rep.f0
    grid = TimesliceParams().grid
    pa, pb = on_shell_profile(a, grid, tail_tol=1e-10), on_shell_profile(b, grid, tail_tol=1e-10)
    # W(out) W(in) = exp(-i Im W2(out, in)) W(f0), so phase * that factor must be 1
    cancel = abs(rep.phase * np.exp(-1j * w2(pb, pa).imag) - 1.0)
    pointwise = float(np.max(np.abs(a.samples + b.samples - f0.samples)))
    ok = cancel < 1e-12 and pointwise < 1e-12
    assert record(7, "factorization", ok, f"phase cancellation {cancel:.1e} < 1e-12; part sum - f0 {pointwise:.1e} < 1e-12")


def test_c08_general_error(slab_report, record):
    f = GridBump.bump(Point2(0.0, 0.0), 0.9, 0.9, 1.0)
    U = Region.diamond(Point2(0.0, 0.0), 2.0)
    assert f.support_region().issubset(geo.causal_completion(U))
    p = TimesliceParams()
    rep = general_error(f, U, 0.1, p)
    assert np.array_equal(rep.part_in.samples, f.samples)  # chi = 1 on supp f
    fr = Frame(Point2(*rep.frame["translation"]), rep.frame["rapidity_offset"])
    direct = error_exact(zeta=0.1, engine=WedgeEngine(f, p.grid, p.model, fr, tail_tol=p.tail_tol))
    reduce_diff = abs(rep.error - direct) / direct
    _, _, srep = slab_report
    pipe_diff = abs(srep.error - srep.extra["oracle_error"]) / srep.extra["oracle_error"]
    ok = rep.path == "fast" and reduce_diff < 1e-8 and srep.path == "slab" and pipe_diff < 1e-6
    detail = f"support in U'' (chi = 1): rel diff {reduce_diff:.1e} < 1e-8; slab pipeline vs oracle on chi f0: {pipe_diff:.1e} < 1e-6"
    assert record(8, "general error", ok, detail)


def test_c09_geometry(record):
    rng = np.random.default_rng(9)
    fails = 0
    for _ in range(100):
        a = random_region(rng)
        b = a | random_region(rng)
        ca = geo.causal_complement(a)
        fails += geo.causal_complement(geo.causal_complement(ca)) != ca
        fails += not a.issubset(geo.causal_completion(a))
        fails += not geo.causal_complement(b).issubset(ca)
    d = geo.causal_complement(Region.diamond(Point2(0.0, 0.0), 1.0))
    diamond = d == Region([(-math.inf, -1.0, 1.0, math.inf), (1.0, math.inf, -math.inf, -1.0)])
    ok = fails == 0 and diamond
    assert record(9, "geometry", ok, f"{fails} failures on 100 random unions; diamond complement exact: {diamond}")


def test_c10_determinism(tmp_path, record):
    a, b = tmp_path / "w1", tmp_path / "w4"
    codes = (
        main(["sweep", "--config", GOLDEN_CFG, "--out", str(a), "--workers", "1"]),
        main(["sweep", "--config", GOLDEN_CFG, "--out", str(b), "--workers", "4"]),
    )
    same = all((a / n).read_bytes() == (b / n).read_bytes() for n in ("sweep.csv", "sweep.json"))
    ok = codes == (0, 0) and same
    assert record(10, "determinism", ok, f"exit codes {codes}; sweep.csv and sweep.json byte-identical: {same}")

"""Command-line runner: ``rsapprox {sweep,verify,timeslice,geometry}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, geometry as geo, kernels, rserror, verify
from .config import ConfigError, RunConfig, load_config, parse_config, region
from .testfn import CONVENTIONS, LatticeError, TailMassError
from .timeslice import TimesliceError, TimesliceParams, general_error

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class NumericalFailure(RuntimeError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write_all(out_dir: Path, files: dict[str, str]):
    """Write every artifact or none: stage in a temp dir, then move into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    with tempfile.TemporaryDirectory(dir=out_dir) as tmp:
        for name, text in files.items():
            p = Path(tmp) / name
            p.write_text(text)
            staged.append((p, out_dir / name))
        for src, dst in staged:
            os.replace(src, dst)


def _meta(cfg: RunConfig) -> dict:
    return {
        "conventions": CONVENTIONS,
        "config": cfg.effective(),
        "kernel_backend": kernels.BACKEND,
        "version": __version__,
    }


# ---------------------------------------------------------------------------
# subcommands


def sweep_artifacts(cfg: RunConfig, base: Path | None, workers: int) -> tuple[dict[str, str], bool]:
    f = cfg.function.build(base)
    eng = rserror.WedgeEngine(f, cfg.grid.build(), cfg.model_build(), cfg.frame.build(), tail_tol=cfg.tolerances.tail)
    res = rserror.sweep(None, cfg.zetas, engine=eng, workers=workers)
    buf = io.StringIO()
    buf.write(",".join(rserror.CSV_COLUMNS) + "\n")
    for r in res.rows:
        buf.write(",".join(_fmt(v) for v in r.as_tuple()) + "\n")
    meta = _meta(cfg)
    meta["h0"] = res.h0
    meta["rows"] = [
        {"zeta": r.zeta, "eta_step": r.L / ((r.n_nodes - 1) // 2) if r.n_nodes > 1 else None, "L": r.L, "n_nodes": r.n_nodes, "failure": r.failure, "richardson": rich}
        for r, rich in zip(res.rows, res.richardson)
    ]
    meta["slope_fit"] = {
        "slope": res.fit.slope,
        "ci95": [res.fit.ci_low, res.fit.ci_high],
        "n_points": res.fit.n_points,
        "window": "smallest decade of zeta",
        "flag": res.fit.flagged,
    }
    meta["rapidity_grid"] = {"theta_max": eng.grid.theta_max, "step": eng.grid.step, "n": eng.grid.n, "tail_mass": eng.profile.tail_mass}
    meta["support_certificate"] = "effective" if not rserror._is_exact(f) else "exact"
    return {"sweep.csv": buf.getvalue(), "sweep.json": _dumps(meta)}, res.failed


def cmd_sweep(cfg: RunConfig, args) -> int:
    files, failed = sweep_artifacts(cfg, args.base, args.workers)
    _write_all(args.out, files)
    print(files["sweep.csv"], end="")
    return EXIT_NUMERIC if failed else EXIT_OK


def verify_report(cfg: RunConfig, base: Path | None) -> dict:
    ctx = verify.Context(
        f=cfg.function.build(base),
        grid=cfg.grid.build(),
        model=cfg.model_build(),
        frame=cfg.frame.build(),
        tol=cfg.tolerances,
        rng=np.random.default_rng(cfg.seed),
        trials=cfg.verify.random_trials,
        contour_zeta=cfg.verify.contour_zeta,
        oracle_zetas=list(cfg.verify.oracle_zetas),
    )
    suites = verify.run_suites(ctx, cfg.verify.suites)
    passed = all(c["passed"] for checks in suites.values() for c in checks)
    rep = _meta(cfg)
    rep.update({"seed": cfg.seed, "suites": suites, "passed": passed})
    return rep


def cmd_verify(cfg: RunConfig, args) -> int:
    rep = verify_report(cfg, args.base)
    _write_all(args.out, {"verify.json": _dumps(rep)})
    for name, checks in rep["suites"].items():
        for c in checks:
            mark = "PASS" if c["passed"] else "FAIL"
            print(f"{mark} [{name}] {c['name']}: {c['measured']:.3e} (tol {c['tolerance']:.1e})")
    return EXIT_OK if rep["passed"] else EXIT_NUMERIC


def cmd_timeslice(cfg: RunConfig, args) -> int:
    ts = cfg.timeslice
    if ts is None:
        raise ConfigError(f"{args.config}: timeslice section required for this subcommand")
    params = TimesliceParams(
        margin_in=ts.margin_in,
        margin_out=ts.margin_out,
        frame_margin=ts.frame_margin,
        slab_fraction=ts.slab_fraction,
        half_width=ts.half_width,
        seam_margin=ts.seam_margin,
        mass=cfg.model.mass,
        theta_max=cfg.grid.theta_max,
        theta_step=cfg.grid.theta_step,
        tail_tol=ts.tail,
    )
    f = cfg.function.build(args.base)
    U = region(ts.region)
    runs = []
    green = True
    for z in sorted(cfg.zetas, reverse=True):
        rep = general_error(f, U, z, params, oracle=ts.oracle)
        j = rep.to_json()
        if ts.oracle and "oracle_error" in j:
            o = j["oracle_error"]
            j["oracle_rel_diff"] = abs(rep.error - o) / o if o else abs(rep.error)
        runs.append(j)
        green = green and all(rep.certificates.values())
    out = _meta(cfg)
    out["runs"] = runs
    out["certificates_green"] = green
    _write_all(args.out, {"timeslice.json": _dumps(out)})
    for j in runs:
        print(f"zeta={_fmt(j['zeta'])} path={j['path']} error={_fmt(j['error'])}")
    return EXIT_OK if green else EXIT_NUMERIC


def geometry_result(spec) -> dict:
    a = region(spec.a)
    b = region(spec.b) if spec.b is not None else None
    op = spec.op
    if op == "relate":
        rel = geo.relate(a, b)
        return {"op": op, "relation": {k: getattr(rel, k) for k in rel.__dataclass_fields__}}
    if op == "select_frame":
        fr = geo.select_frame(a, spec.margin)
        return {
            "op": op,
            "frame": {"translation": [fr.translation.x0, fr.translation.x1], "rapidity_offset": fr.rapidity_offset},
            "region_in_frame": fr.region_to_frame(a).to_literal(),
        }
    fn = {
        "complement": lambda: geo.causal_complement(a),
        "completion": lambda: geo.causal_completion(a),
        "future": lambda: geo.causal_future(a),
        "past": lambda: geo.causal_past(a),
        "union": lambda: a | b,
        "intersection": lambda: a & b,
        "difference": lambda: a - b,
        "inflate": lambda: a.inflate(spec.margin),
    }[op]
    return {"op": op, "result": fn().to_literal()}


def cmd_geometry(cfg: RunConfig, args) -> int:
    if cfg.geometry is None:
        raise ConfigError(f"{args.config}: geometry section required for this subcommand")
    res = geometry_result(cfg.geometry)
    text = json.dumps(res, sort_keys=True, allow_nan=True)
    _write_all(args.out, {"geometry.json": _dumps(res)})
    print(text)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "verify": cmd_verify, "timeslice": cmd_timeslice, "geometry": cmd_geometry}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rsapprox", description="Wedge-local approximation of coherent states of a free scalar field.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("sweep", "error sweep over zeta values (CSV + JSON)"),
        ("verify", "run invariant suites and report residuals"),
        ("timeslice", "general-region pipeline report"),
        ("geometry", "region algebra on box unions"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, help="YAML run configuration (defaults apply when omitted)")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for row-parallel work")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.config else parse_config("", "<defaults>")
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg = cfg.model_copy(update={"seed": args.seed})
        args.base = args.config.parent if args.config else None
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TailMassError, rserror.QuadratureError, TimesliceError, LatticeError, rserror.SupportError, geo.GeometryError, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Time the compiled and NumPy kernel backends on representative sizes.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json out.json]
"""

import argparse
import json
import timeit

import numpy as np

from rsapprox import kernels
from rsapprox.testfn import GridBump, RapidityGrid
from rsapprox.geometry import Point2


def cases():
    f = GridBump.bump(Point2(0.0, -3.0), 1.0, 1.0, amplitude=3.0)
    L = f.lattice
    th = RapidityGrid().nodes()
    om, kk = np.cosh(th), np.sinh(th)
    rng = np.random.default_rng(0)
    qt = rng.uniform(L.t[5], L.t[-6], 200_000)
    qx = rng.uniform(L.x[5], L.x[-6], 200_000)
    F = rng.standard_normal(th.size) + 1j * rng.standard_normal(th.size)
    w = RapidityGrid().weights()
    return {
        "ndft2 (2201 x 107^2)": lambda k: k.ndft2(om, kk, L.t, L.x, f.samples, np.float64),
        "lagrange_resample (2e5 pts)": lambda k: k.lagrange_resample(f.samples, L.t0, L.dt, L.x0, L.dx, qt, qx),
        "lag_correlation (2201, all lags)": lambda k: k.lag_correlation(F, w, th.size - 1),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None, help="write timings to this file")
    args = ap.parse_args(argv)
    backends = dict(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernels not built; timing the NumPy fallback only")
    results = {}
    print(f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases().items():
        row = {}
        ref = None
        for b, mod in backends.items():
            out = fn(mod)
            if ref is None:
                ref = out
            else:
                np.testing.assert_allclose(out, ref, rtol=1e-10, atol=1e-10)
            row[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        results[name] = row
        line = f"{name:34s}" + "".join(f"{row[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            line += f"{row['python'] / row['cython']:11.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()

"""Compiled vs pure-Python kernels on the two hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per workload with the best wall time of each backend, the
speedup and the largest disagreement between the two results.
"""

import argparse
import time

import numpy as np

from almostred import kernels
from almostred.arithmetic import cf_expand
from almostred.cocycle import amo_potential, grid_fixed, schrodinger_cocycle
from almostred.linalg2 import log_opnorm2


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def products_workload(grid, N, t):
    c = schrodinger_cocycle(cf_expand("golden", 64), 0.3, amo_potential(3.0))
    x = grid_fixed(grid)
    tt = np.full(grid, t)
    cks = [N // 4, N // 2, N]

    def run():
        mats, logs = c.products(x, tt, cks)
        return logs + log_opnorm2(mats)
    return run


def riccati_workload(n, ne):
    f = cf_expand("golden", 64)
    ph = (np.arange(n) * f.alpha) % 1.0
    v = 2 * 0.5 * np.cos(2 * np.pi * ph)
    E = np.linspace(-3, 3, ne)
    return lambda: kernels.riccati_sign_changes(v, E).astype(float)


WORKLOADS = [
    ("orbit_products grid=256 N=4096 t=0", lambda: products_workload(256, 4096, 0.0)),
    ("orbit_products grid=1024 N=8192 t=0.05", lambda: products_workload(1024, 8192, 0.05)),
    ("riccati n=100000 energies=64", lambda: riccati_workload(100000, 64)),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        kernels.use_backend("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'workload':44s} {'compiled':>10s} {'python':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, make in WORKLOADS:
        fn = make()
        kernels.use_backend("compiled")
        tc, rc = _best(fn, args.repeat)
        kernels.use_backend("python")
        tp, rp = _best(fn, args.repeat)
        diff = float(np.abs(np.asarray(rc) - np.asarray(rp)).max())
        print(f"{name:44s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f} {diff:10.2e}")
    kernels.use_backend("compiled")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

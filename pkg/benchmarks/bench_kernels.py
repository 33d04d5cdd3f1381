"""Time the direct Riesz pair sum under numba and under the numpy fallback.

The backend is chosen at import time from ``GNX_NUMBA``, so each backend runs
in its own interpreter. The numba timing excludes the first (compiling) call.

    python benchmarks/bench_kernels.py --sizes 8,12,16 --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
from gnx import kernels
from gnx.spectral import make_grid, make_profile

d, repeat, sizes = int(sys.argv[1]), int(sys.argv[2]), [int(v) for v in sys.argv[3].split(",")]
rows = []
for n in sizes:
    grid = make_grid(d, n, 10.0)
    rho = abs(make_profile(grid, "random", seed=1).physical()) ** 2
    value = kernels.pair_sum(rho, rho, grid, 1.0).real  # warm-up / compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernels.pair_sum(rho, rho, grid, 1.0)
        best = min(best, time.perf_counter() - t0)
    rows.append({"n": n, "cells": grid.size, "seconds": best, "value": value})
print(json.dumps(rows))
"""


def run_backend(flag, d, repeat, sizes):
    env = dict(os.environ, GNX_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(d), str(repeat), sizes],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--sizes", default="8,12,16")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    fast = run_backend("1", args.d, args.repeat, args.sizes)
    slow = run_backend("0", args.d, args.repeat, args.sizes)
    print(f"{'n':>4} {'cells':>7} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8} {'rel diff':>10}")
    for a, b in zip(fast, slow):
        diff = abs(a["value"] - b["value"]) / abs(b["value"])
        print(f"{a['n']:>4} {a['cells']:>7} {a['seconds']:>11.4f} {b['seconds']:>11.4f} "
              f"{b['seconds'] / a['seconds']:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()

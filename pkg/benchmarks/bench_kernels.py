"""Time the Cartan kernel on both backends.

    python3 benchmarks/bench_kernels.py [--points 20000] [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from einstein_obs import kernels
from einstein_obs import metrics as M


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--metric", default="taub_nut", choices=sorted(M.CATALOG))
    args = ap.parse_args(argv)

    g = M.CATALOG[args.metric]()
    pts = g.sample_points(args.points, seed=0)
    A, dA, ddA = g.coframe().jet_arrays(pts)

    names = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    ref = kernels.cartan(A, dA, ddA, "numpy")
    if kernels.HAS_NUMBA:
        kernels.cartan(A[:2], dA[:2], ddA[:2], "numba")  # compile outside the timing
        got = kernels.cartan(A, dA, ddA, "numba")
        diff = max(float(np.abs(x - y).max()) for x, y in zip(ref, got))
        print(f"max |numba - numpy| = {diff:.2e}")

    times = {}
    for name in names:
        times[name] = best_of(lambda: kernels.cartan(A, dA, ddA, name), args.repeat)
        print(f"{name:6s} {args.points:7d} points  {times[name] * 1e3:9.2f} ms  "
              f"{times[name] / args.points * 1e6:7.3f} us/point")
    if len(times) == 2:
        print(f"speedup numba/numpy: {times['numpy'] / times['numba']:.2f}x")


if __name__ == "__main__":
    main()

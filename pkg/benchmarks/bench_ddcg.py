"""Benchmark: compiled double-double CG kernels vs the pure-Python fallback.

Usage: python benchmarks/bench_ddcg.py [--sizes 100,200,400] [--reps 5]
"""

import argparse
import time

import numpy as np

from cglab import _ddcore_py as pyimpl
from cglab import ddcore


def time_call(fn, *args, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="100,200,400,800")
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--eps", type=float, default=1e-4)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if ddcore.BACKEND != "compiled":
        print("warning: compiled extension not available; comparing python to itself")

    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'kind':>9} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for n in sizes:
        lam = rng.uniform(1e-3, 1.0, size=n)
        b = rng.normal(size=n)
        b /= np.linalg.norm(b)
        tc = time_call(ddcore.cg_diagonal, lam, b, args.eps, 10 * n, reps=args.reps)
        tp = time_call(pyimpl.cg_diagonal, lam, b, args.eps, 10 * n, reps=args.reps)
        print(f"{n:6d} {'diagonal':>9} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.0f}x")

    for n in (16, 32, 64):
        a = rng.normal(size=(n, n))
        m = a @ a.T + n * np.eye(n)
        b = rng.normal(size=n)
        b /= np.linalg.norm(b)
        tc = time_call(ddcore.cg_dense, m, b, 1e-10, 10 * n, reps=args.reps)
        tp = time_call(pyimpl.cg_dense, m.tolist(), b, 1e-10, 10 * n, reps=args.reps)
        print(f"{n:6d} {'dense':>9} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.0f}x")


if __name__ == "__main__":
    main()

"""Throughput of the compiled walk kernel against the pure-Python fallback.

    python benchmarks/bench_walk.py [--trials 5000] [--repeat 3]

Both kernels run the same trial indices, and the outputs are checked to be
identical before any timing is reported.
"""
import argparse
import sys
import time
from fractions import Fraction

import numpy as np

from barrierpaths import _kernels
from barrierpaths.barrier import Constant, Linear, LinearSqrt
from barrierpaths.walk import WalkConfig, run_trials

CASES = [
    ("linear:r=1,s=1 p=1/2", Linear(1, 1), Fraction(1, 2)),
    ("const:s=3 p=1/3", Constant(3), Fraction(1, 3)),
    ("linsqrt:theta=1/2,c=2 p=2/3", LinearSqrt(Fraction(1, 2), 2), Fraction(2, 3)),
]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=5_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cap", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args(argv)

    compiled = _kernels.compiled_kernel
    if compiled is None:
        print("compiled kernel not built; only the Python kernel is available", file=sys.stderr)
        return 1

    print(f"{'case':32} {'python s':>10} {'cython s':>10} {'speedup':>8}  identical")
    for name, b, p in CASES:
        cfg = WalkConfig(b, p, master_seed=args.seed, step_cap=args.cap)
        t_py, out_py = best_of(lambda: run_trials(cfg, args.trials, kernel=_kernels.python_kernel), args.repeat)
        t_cy, out_cy = best_of(lambda: run_trials(cfg, args.trials, kernel=compiled), args.repeat)
        same = all(np.array_equal(a, c) for a, c in zip(out_py, out_cy))
        print(f"{name:32} {t_py:10.3f} {t_cy:10.4f} {t_py / t_cy:7.0f}x  {same}")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Throughput comparison of the numba kernels against the pure-Python path.

The same kernel source runs either JIT-compiled or as plain Python (the
fallback selected by PERIODICGAME_NO_NUMBA=1 at import time); this script
times both variants in one process and prints steps/second.

Usage:
    python benchmarks/bench_backends.py [--steps N] [--python-steps N]
"""

import argparse
import time

import numpy as np

import periodicgame as pg
from periodicgame import _kernels


def time_schedule(fn, algo, mats, eta, steps, lw1, lw2):
    rec = np.array([0, steps], dtype=np.int64)
    out1 = np.empty((2, lw1.size))
    out2 = np.empty((2, lw2.size))
    start = time.perf_counter()
    fn(algo, mats, eta, steps, rec, lw1.copy(), lw2.copy(),
       lw1.copy(), lw2.copy(), out1, out2)
    return time.perf_counter() - start


def time_reduced(fn, steps):
    z0 = np.array([0.45, 0.45, 0.45, 0.45])
    out = np.empty((steps + 1, 4))
    start = time.perf_counter()
    fn(z0, 1e-3, steps, out)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2_000_000,
                        help="steps for the jit backend")
    parser.add_argument("--python-steps", type=int, default=50_000,
                        help="steps for the pure-Python backend")
    args = parser.parse_args()

    mats = pg.experiment_by_name("game2x2").game.stacked()
    lw = np.log(np.array([0.45, 0.55]))

    if pg.USING_NUMBA:
        backends = [("numba", _kernels.run_schedule, _kernels.run_reduced_composite,
                     args.steps),
                    ("python", _kernels.run_schedule.py_func,
                     _kernels.run_reduced_composite.py_func, args.python_steps)]
        # warm the JIT outside the timed region
        time_schedule(_kernels.run_schedule, _kernels.ALGO_EXTRA, mats, 0.1, 10, lw, lw)
        time_reduced(_kernels.run_reduced_composite, 10)
    else:
        print("numba disabled (PERIODICGAME_NO_NUMBA); timing pure Python only")
        backends = [("python", _kernels.run_schedule,
                     _kernels.run_reduced_composite, args.python_steps)]

    print(f"{'workload':<14}{'backend':<10}{'steps':>12}{'steps/s':>14}{'time':>11}")
    rates = {}
    for label, schedule_fn, reduced_fn, steps in backends:
        for name, algo, eta in (("mwu 2x2", _kernels.ALGO_MWU, 0.1),
                                ("omwu 2x2", _kernels.ALGO_OMWU, 0.01),
                                ("extra 2x2", _kernels.ALGO_EXTRA, 0.1)):
            elapsed = time_schedule(schedule_fn, algo, mats, eta, steps, lw, lw)
            rates[(name, label)] = steps / elapsed
            print(f"{name:<14}{label:<10}{steps:>12}{steps / elapsed:>14.3g}"
                  f"{elapsed:>10.3f}s")
        elapsed = time_reduced(reduced_fn, steps // 2)
        rates[("reduced", label)] = (steps // 2) / elapsed
        print(f"{'reduced map':<14}{label:<10}{steps // 2:>12}"
              f"{(steps // 2) / elapsed:>14.3g}{elapsed:>10.3f}s")

    if pg.USING_NUMBA:
        print()
        for name in ("mwu 2x2", "omwu 2x2", "extra 2x2", "reduced"):
            ratio = rates[(name, "numba")] / rates[(name, "python")]
            print(f"{name}: numba is {ratio:.0f}x faster")


if __name__ == "__main__":
    main()

"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat N]

The solver itself is dominated by BLAS/LAPACK calls (matrix products,
eigendecompositions, Cholesky solves) that numpy already runs in compiled
code, so only the loop-shaped kernels are implemented twice: row norms,
the k-means assignment and accumulation steps, and contingency counting.
"""

import argparse
import time

import numpy as np

from cspca import _kernels_py

try:
    from cspca import _kernels_cy
except ImportError:
    _kernels_cy = None


def bench(fn, args, repeat):
    fn(*args)  # warm up
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    big = rng.standard_normal((20000, 64))
    points = rng.standard_normal((20000, 16))
    centers = rng.standard_normal((32, 16))
    labels = rng.integers(0, 32, size=20000)
    a = rng.integers(0, 40, size=1_000_000)
    b = rng.integers(0, 40, size=1_000_000)

    cases = [
        ("row_norms (20000x64)", "row_norms", (big,)),
        ("nearest_centers (20000x16, 32 centers)", "nearest_centers",
         (points, centers)),
        ("sum_by_label (20000x16, 32 groups)", "sum_by_label",
         (points, labels, 32)),
        ("contingency_table (1e6 pairs, 40x40)", "contingency_table",
         (a, b, 40, 40)),
    ]

    print(f"{'kernel':<42}{'python':>12}{'cython':>12}{'speedup':>10}")
    for title, name, call_args in cases:
        t_py = bench(getattr(_kernels_py, name), call_args, args.repeat)
        if _kernels_cy is None:
            print(f"{title:<42}{t_py * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        t_cy = bench(getattr(_kernels_cy, name), call_args, args.repeat)
        print(f"{title:<42}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms"
              f"{t_py / t_cy:>9.1f}x")

    if _kernels_cy is None:
        print("\ncompiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()

"""Benchmark the compiled counting kernel against the numpy fallback.

The kernel fills the (x_t, y_t, x-context, y-context) count tensor that
every fitted transfer statistic and permutation trial consumes; it is the
hot loop of the statistical-power runs. Run:

    python benchmarks/bench_counts.py [--n 100000] [--repeats 30]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from semicausal import _stats_py

try:
    from semicausal import _stats_core
except ImportError:
    _stats_core = None


def bench(fn, x, y, order, alphabet, repeats):
    fn(x, y, order, alphabet)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(x, y, order, alphabet)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=30)
    parser.add_argument("--alphabet", type=int, default=2)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    x = rng.integers(0, args.alphabet, size=args.n, dtype=np.int64)
    y = rng.integers(0, args.alphabet, size=args.n, dtype=np.int64)

    print(f"n={args.n}, alphabet={args.alphabet}, repeats={args.repeats}")
    header = f"{'order':>6} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for order in (0, 1, 2, 3):
        py_time = bench(_stats_py.joint_counts, x, y, order, args.alphabet, args.repeats)
        if _stats_core is None:
            print(f"{order:>6} {py_time * 1e3:>12.3f} {'not built':>14} {'-':>8}")
            continue
        c_time = bench(_stats_core.joint_counts, x, y, order, args.alphabet, args.repeats)
        assert np.array_equal(
            _stats_py.joint_counts(x, y, order, args.alphabet),
            _stats_core.joint_counts(x, y, order, args.alphabet),
        )
        print(f"{order:>6} {py_time * 1e3:>12.3f} {c_time * 1e3:>14.3f} "
              f"{py_time / c_time:>7.1f}x")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the two simulation kernels: compiled (Cython) vs NumPy.

Usage: python benchmarks/bench_simulator.py [--reps 100000,1000000]

Both backends consume identical substreams, so this is a pure speed
comparison; a correctness cross-check runs first.
"""

import argparse
import time

import numpy as np

from engagekit.badge_design import BadgePolicy, optimize_thresholds
from engagekit.badge_sim import HAVE_COMPILED_KERNEL, simulate_totals
from engagekit.distributions import ExponentialMotivation, UniformMotivation


def time_backend(policy, dist, reps, backend, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        simulate_totals(policy, dist, reps, seed=42, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", default="100000,1000000",
                        help="comma-separated replication counts")
    args = parser.parse_args()
    rep_counts = [int(r) for r in args.reps.split(",")]

    u05 = UniformMotivation(0, 5)
    cases = [
        ("uniform[0,5], optimal K=3", u05, optimize_thresholds(u05, 3).policy),
        ("exponential(1), ladder (1,2,3)", ExponentialMotivation(1.0),
         BadgePolicy((1.0, 2.0, 3.0))),
    ]

    backends = ["python"]
    if HAVE_COMPILED_KERNEL:
        backends.insert(0, "compiled")
        # sanity: identical tier counts, near-identical totals
        for _, dist, policy in cases:
            t_c, k_c = simulate_totals(policy, dist, 10_000, seed=1, backend="compiled")
            t_p, k_p = simulate_totals(policy, dist, 10_000, seed=1, backend="python")
            assert np.array_equal(k_c, k_p)
            np.testing.assert_allclose(t_c, t_p, rtol=1e-12)
        print("backend cross-check ok (10k replications, both cases)\n")
    else:
        print("compiled kernel not built; benchmarking the NumPy backend only\n")

    header = f"{'case':34s} {'reps':>9s} " + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name, dist, policy in cases:
        for reps in rep_counts:
            times = {b: time_backend(policy, dist, reps, b) for b in backends}
            row = f"{name:34s} {reps:>9d} " + "".join(
                f"{times[b] * 1000:>10.1f}ms" for b in backends
            )
            if len(backends) == 2:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()

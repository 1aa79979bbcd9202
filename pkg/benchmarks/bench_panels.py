"""Benchmark the two panel-generation backends and cross-check parity.

Usage:
    python benchmarks/bench_panels.py [--panels 2000]

The jitted kernel and the vectorised NumPy fallback must be bit-identical;
this script times both on a few panel sizes and fails loudly if any output
pair diverges. Select the fallback at runtime elsewhere with
DOUBLESCORE_NUMBA=0.
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from doublescore.lab.kernels import load_numba_kernel, panel_points_numpy
from doublescore.lab.panels import acceptance_limit

SIZES = (5, 20, 100)
COMPETENCE_CYCLE = [Fraction(n, 10) for n in (9, 7, 5, 3, 1, 0, 10, 2)]


def limits_for(experts: int) -> np.ndarray:
    cs = [COMPETENCE_CYCLE[i % len(COMPETENCE_CYCLE)] for i in range(experts)]
    return np.array([acceptance_limit(c) for c in cs], dtype=np.uint64)


def run(fn, limits, panels: int, base_seed: int) -> tuple[float, int]:
    checksum = 0
    started = time.perf_counter()
    for i in range(panels):
        counts = fn(base_seed + i, limits, i % 4)
        checksum ^= int(counts.sum(axis=0)[i % 4])
    return time.perf_counter() - started, checksum


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--panels", type=int, default=2000, help="panels per size")
    args = parser.parse_args()

    numba_fn = load_numba_kernel()
    # trigger compilation outside the timed region
    numba_fn(1, limits_for(2), 0)

    print(f"{'experts':>8} {'panels':>8} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for experts in SIZES:
        limits = limits_for(experts)
        t_numba, sum_numba = run(numba_fn, limits, args.panels, base_seed=9000)
        t_numpy, sum_numpy = run(panel_points_numpy, limits, args.panels, base_seed=9000)
        if sum_numba != sum_numpy:
            raise SystemExit(f"backend divergence at {experts} experts!")
        speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
        print(
            f"{experts:>8} {args.panels:>8} {t_numba:>11.3f}s {t_numpy:>11.3f}s "
            f"{speedup:>8.1f}x"
        )

    # full-array parity spot check on top of the checksums
    limits = limits_for(16)
    for seed in (3, 2**62 + 5):
        for truth in range(4):
            if not np.array_equal(
                numba_fn(seed, limits, truth), panel_points_numpy(seed, limits, truth)
            ):
                raise SystemExit("backend divergence in parity spot check!")
    print("parity: identical output from both backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

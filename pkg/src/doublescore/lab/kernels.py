"""Hot panel-generation kernels: numba-jitted loop with a NumPy fallback.

Point placement dominates simulation runtime (100 draws per expert per
trial, two stream values per draw), so it is the one spot worth a compiled
kernel. Both backends consume the identical SplitMix64 stream and are
bit-for-bit interchangeable; ``benchmarks/bench_panels.py`` times them and
cross-checks equality.

Backend selection: numba when importable, unless the environment variable
``DOUBLESCORE_NUMBA`` is set to ``0``/``false``/``off``/``no``, which
forces the NumPy path. ``BACKEND`` names the active one.

Stream layout for one panel seeded with s: point q = expert*100 + p uses
stream values 2q (placement draw u) and 2q+1 (miss-bucket draw v). The
point lands on the truth level when u <= limit[expert], otherwise on
``others[v mod 3]`` where ``others`` holds the three non-truth levels in
ascending order. Limits come from panels.acceptance_limit.
"""

from __future__ import annotations

import os

import numpy as np

from doublescore.lab.rng import GAMMA, MASK64, MIX_1, MIX_2, stream_block
from doublescore.voting import TOTAL_POINTS

N_LEVELS = 4


def panel_points_numpy(seed: int, limits: np.ndarray, truth_idx: int) -> np.ndarray:
    """Vectorised point placement; returns int64 counts of shape (experts, 4)."""
    experts = limits.shape[0]
    draws = stream_block(seed, 0, 2 * experts * TOTAL_POINTS)
    u = draws[0::2]
    v = draws[1::2]
    hit = u <= np.repeat(limits, TOTAL_POINTS)
    others = np.array([lvl for lvl in range(N_LEVELS) if lvl != truth_idx], dtype=np.int64)
    level = np.where(hit, np.int64(truth_idx), others[(v % np.uint64(3)).astype(np.int64)])
    expert_idx = np.repeat(np.arange(experts, dtype=np.int64), TOTAL_POINTS)
    counts = np.bincount(expert_idx * N_LEVELS + level, minlength=experts * N_LEVELS)
    return counts.reshape(experts, N_LEVELS).astype(np.int64)


def _env_allows_numba() -> bool:
    flag = os.environ.get("DOUBLESCORE_NUMBA", "").strip().lower()
    return flag not in {"0", "false", "off", "no"}


def _build_numba_kernel():
    from numba import njit, uint64

    @njit(cache=True)
    def _mix64(z):
        z = (z ^ (z >> uint64(30))) * uint64(MIX_1)
        z = (z ^ (z >> uint64(27))) * uint64(MIX_2)
        return z ^ (z >> uint64(31))

    @njit(cache=True)
    def _panel_points(seed, limits, truth_idx):
        experts = limits.shape[0]
        counts = np.zeros((experts, N_LEVELS), dtype=np.int64)
        others = np.empty(N_LEVELS - 1, dtype=np.int64)
        j = 0
        for lvl in range(N_LEVELS):
            if lvl != truth_idx:
                others[j] = lvl
                j += 1
        for e in range(experts):
            limit = limits[e]
            for p in range(TOTAL_POINTS):
                k = uint64(2) * uint64(e * TOTAL_POINTS + p)
                u = _mix64(seed + (k + uint64(1)) * uint64(GAMMA))
                v = _mix64(seed + (k + uint64(2)) * uint64(GAMMA))
                if u <= limit:
                    counts[e, truth_idx] += 1
                else:
                    counts[e, others[v % uint64(3)]] += 1
        return counts

    def panel_points_numba(seed: int, limits: np.ndarray, truth_idx: int) -> np.ndarray:
        return _panel_points(np.uint64(seed & MASK64), limits, truth_idx)

    return panel_points_numba


def load_numba_kernel():
    """The jitted kernel regardless of the env flag; used by the benchmark
    and the parity tests. Raises ImportError when numba is unavailable."""
    return _build_numba_kernel()


BACKEND = "numpy"
panel_points = panel_points_numpy

if _env_allows_numba():
    try:
        panel_points = _build_numba_kernel()
        BACKEND = "numba"
    except ImportError:
        pass

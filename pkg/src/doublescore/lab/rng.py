"""Deterministic counter-based random stream (SplitMix64).

Output k of a stream seeded with s is ``mix64(s + (k + 1) * GAMMA)`` with
all arithmetic modulo 2**64, which is exactly the SplitMix64 sequence.
Treating the generator as a pure function of (seed, index) means the scalar
path, the vectorised NumPy path, and the jitted kernels all produce
identical bits on every platform, so simulation snapshots are stable.

Constants are the published SplitMix64 increment (the 64-bit golden ratio)
and finalizer multipliers.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit unsigned integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def stream_value(seed: int, index: int) -> int:
    """Output ``index`` (0-based) of the stream seeded with ``seed``."""
    return mix64(seed + (index + 1) * GAMMA)


def stream_block(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` as a uint64 array.

    Vectorised elementwise mix64; uint64 array arithmetic wraps modulo
    2**64, matching the scalar path bit for bit.
    """
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_2)
    return z ^ (z >> np.uint64(31))

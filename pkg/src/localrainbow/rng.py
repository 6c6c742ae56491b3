"""Deterministic 64-bit random stream (splitmix64) with random access.

All randomness in this package flows through this module so that families
and experiments are bit-identical across platforms and runs.  The stream
is the classic splitmix64 update: output ``i`` (0-based) from ``seed`` is
``mix64(seed + (i + 1) * GOLDEN)`` where ``mix64`` is the splitmix64
finalizer.  Sequential iteration and random access agree by construction.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB


def mix64_int(z: int) -> int:
    """splitmix64 finalizer on a plain Python int (mod 2^64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def stream_value(seed: int, index: int) -> int:
    """Value at position ``index`` of the stream started from ``seed``."""
    return mix64_int((seed + (index + 1) * GOLDEN) & MASK64)


def stream_values(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``stream_value`` over an index array (uint64 out)."""
    z = (np.asarray(indices, dtype=np.uint64) + np.uint64(1)) * np.uint64(GOLDEN)
    z = z + np.uint64(seed & MASK64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_B)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Sequential view of the stream; ``next_*`` walks positions 0, 1, 2, ..."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._pos = 0

    def next_uint(self) -> int:
        value = stream_value(self.seed, self._pos)
        self._pos += 1
        return value

    def next_below(self, bound: int) -> int:
        """Next value reduced mod ``bound`` (tiny modulo bias, documented)."""
        return self.next_uint() % bound

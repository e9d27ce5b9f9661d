"""Counter-based random substreams for the trajectory simulator.

Each replication index i owns an independent substream seeded by
``mix64(seed ^ mix64(i + 1))``; draw j of that replication is
``mix64(h_i + (j + 1) * GOLDEN)`` mapped to [0, 1) via the top 53 bits.
This is splitmix64 with a per-replication phase: stateless, so any
partition of the index range produces identical draws (worker-count
independence) and two policies evaluated with the same seed share
draws replication-by-replication (common random numbers).

Both the compiled kernel and the NumPy fallback implement exactly this
arithmetic; the pure-int helpers here are the reference definition.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def stream_seed(seed: int, index: int) -> int:
    """Per-replication substream phase."""
    return mix64((seed & MASK64) ^ mix64((index + 1) & MASK64))


def draw_unit(seed: int, index: int, j: int) -> float:
    """Draw j of replication ``index``, uniform on [0, 1)."""
    h = stream_seed(seed, index)
    return (mix64((h + (j + 1) * GOLDEN) & MASK64) >> 11) * _TO_UNIT


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MULT1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MULT2)
    z ^= z >> np.uint64(31)
    return z


def stream_seeds_np(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized substream phases for replications start..start+count-1."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_np(np.uint64(seed & MASK64) ^ _mix64_np(idx))


def draw_units_np(h: np.ndarray, j: int) -> np.ndarray:
    """Draw j for every substream phase in ``h``, uniform on [0, 1)."""
    step = np.uint64(((j + 1) * GOLDEN) & MASK64)
    with np.errstate(over="ignore"):
        u64 = _mix64_np(h + step)
    return (u64 >> np.uint64(11)) * _TO_UNIT

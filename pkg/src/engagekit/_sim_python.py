"""NumPy fallback for the trajectory simulation kernel.

Mirrors the compiled kernel draw-for-draw (see ``_streams`` for the
substream definition). The tier loop is over at most K+1 rounds, each a
vectorized pass over all replications, so this backend is fast enough for
production use; the compiled kernel just shaves the constant factor.
"""

from __future__ import annotations

import numpy as np

from ._streams import draw_unit, draw_units_np, stream_seeds_np

KIND_UNIFORM = 0
KIND_EXPONENTIAL = 1


def simulate_totals(
    kind: int,
    p0: float,
    p1: float,
    increments: np.ndarray,
    replications: int,
    seed: int,
    start: int = 0,
):
    """Simulate trajectories for replication indices start..start+n-1.

    Returns (totals, tiers): activities completed and tiers earned per
    replication.
    """
    n = int(replications)
    h = stream_seeds_np(seed, start, n)
    totals = np.zeros(n)
    tiers = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    increments = np.asarray(increments, dtype=float)
    for j, threshold in enumerate(increments):
        u = draw_units_np(h, j)
        v = _transform(kind, p0, p1, u)
        passed = active & (v >= threshold)
        failed = active & ~passed
        totals[passed] += threshold
        tiers[passed] += 1
        totals[failed] += v[failed]
        active = passed
        if not active.any():
            return totals, tiers
    u = draw_units_np(h, len(increments))
    v = _transform(kind, p0, p1, u)
    totals[active] += v[active]
    return totals, tiers


def _transform(kind: int, p0: float, p1: float, u: np.ndarray) -> np.ndarray:
    if kind == KIND_UNIFORM:
        return p0 + u * (p1 - p0)
    if kind == KIND_EXPONENTIAL:
        return -np.log1p(-u) / p0
    raise ValueError(f"unknown distribution kind code {kind}")


def simulate_totals_generic(dist, increments, replications: int, seed: int, start: int = 0):
    """Scalar path for distributions without a kernel kind code.

    Draws come from the same substreams, mapped through the distribution's
    quantile function. Slow (per-draw Python), intended for small studies
    of custom families.
    """
    n = int(replications)
    totals = np.zeros(n)
    tiers = np.zeros(n, dtype=np.int64)
    k = len(increments)
    for i in range(n):
        idx = start + i
        total = 0.0
        earned = 0
        for j, threshold in enumerate(increments):
            v = dist.quantile(draw_unit(seed, idx, j))
            if v >= threshold:
                total += threshold
                earned += 1
            else:
                total += v
                break
        else:
            total += dist.quantile(draw_unit(seed, idx, k))
        totals[i] = total
        tiers[i] = earned
    return totals, tiers

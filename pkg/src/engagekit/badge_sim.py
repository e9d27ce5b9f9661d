"""Monte Carlo validation of badge ladders.

Replays the renewal mechanics directly — draw motivation, clear tiers
while the draw covers the next increment, finish with one terminal draw —
and estimates the expected total activities per user. The analytic value
from :mod:`engagekit.badge_design` is the oracle these estimates are
checked against.

Two interchangeable kernels do the replication loop: a compiled Cython
extension (preferred) and a vectorized NumPy fallback, selected at import.
Both consume identical counter-based substreams (see ``_streams``), so a
seed pins the result regardless of worker count, and policies compared
under one seed share draws replication-for-replication. With uniform
priors the backends agree bit-for-bit; exponential draws may differ in
the last ulp (NumPy's log1p vs libm's).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _sim_python
from ._sim_python import KIND_EXPONENTIAL, KIND_UNIFORM
from .badge_design import BadgePolicy
from .distributions import (
    ExponentialMotivation,
    MotivationDistribution,
    UniformMotivation,
)

try:
    from . import _simkernel
except ImportError:  # extension not built; NumPy fallback only
    _simkernel = None

HAVE_COMPILED_KERNEL = _simkernel is not None

__all__ = [
    "UserTrajectory",
    "SimulationEstimate",
    "HAVE_COMPILED_KERNEL",
    "available_backends",
    "trajectory_from_draws",
    "simulate_user",
    "estimate_value",
    "compare_policies",
]


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if HAVE_COMPILED_KERNEL else ("python",)


@dataclass(frozen=True)
class UserTrajectory:
    """One simulated user: the draws consumed, work done, tiers earned."""

    draws: tuple[float, ...]
    activities_completed: float
    tiers_earned: int


@dataclass(frozen=True)
class SimulationEstimate:
    """Mean activities per user with its Monte Carlo standard error."""

    mean: float
    stderr: float
    replications: int
    seed: int


def trajectory_from_draws(policy: BadgePolicy, draws: Iterable[float]) -> UserTrajectory:
    """Replay the ladder mechanics against an explicit draw sequence.

    Consumes one draw per tier attempt plus, after a full ladder, one
    terminal draw. Raises if the sequence runs out mid-trajectory.
    """
    it = iter(draws)
    consumed: list[float] = []

    def next_draw() -> float:
        try:
            v = float(next(it))
        except StopIteration:
            raise ValueError(
                f"draw sequence exhausted after {len(consumed)} draws"
            ) from None
        if v < 0:
            raise ValueError(f"motivation draws must be >= 0, got {v}")
        consumed.append(v)
        return v

    total = 0.0
    earned = 0
    for threshold in policy.increments:
        v = next_draw()
        if v >= threshold:
            total += threshold
            earned += 1
        else:
            total += v
            break
    else:
        total += next_draw()
    return UserTrajectory(tuple(consumed), total, earned)


def simulate_user(
    policy: BadgePolicy, dist: MotivationDistribution, rng: np.random.Generator
) -> UserTrajectory:
    """Simulate a single user with motivation drawn from ``dist``."""
    draws = (float(dist.sample(rng)) for _ in itertools.count())
    return trajectory_from_draws(policy, draws)


def _kernel_args(dist: MotivationDistribution):
    if isinstance(dist, UniformMotivation):
        return KIND_UNIFORM, dist.lo, dist.hi
    if isinstance(dist, ExponentialMotivation):
        return KIND_EXPONENTIAL, dist.rate, 0.0
    return None


def _run_kernel(dist, increments, replications, seed, start, backend):
    args = _kernel_args(dist)
    if args is None:
        if backend == "compiled":
            raise ValueError(
                f"compiled backend supports uniform/exponential only, not {dist.kind}"
            )
        return _sim_python.simulate_totals_generic(
            dist, increments, replications, seed, start
        )
    kind, p0, p1 = args
    if backend == "compiled":
        return _simkernel.simulate_totals(
            kind, p0, p1, increments, replications, seed, start
        )
    return _sim_python.simulate_totals(
        kind, p0, p1, increments, replications, seed, start
    )


def _resolve_backend(backend: str, dist: MotivationDistribution) -> str:
    if backend == "auto":
        if HAVE_COMPILED_KERNEL and _kernel_args(dist) is not None:
            return "compiled"
        return "python"
    if backend not in ("compiled", "python"):
        raise ValueError(f"backend must be auto|compiled|python, got {backend!r}")
    if backend == "compiled" and not HAVE_COMPILED_KERNEL:
        raise RuntimeError("compiled simulation kernel is not available")
    return backend


def simulate_totals(
    policy: BadgePolicy,
    dist: MotivationDistribution,
    replications: int,
    seed: int,
    backend: str = "auto",
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-replication (totals, tiers) arrays for replications 0..n-1.

    The substreams are indexed by replication, so results are identical
    for any ``workers`` value; threads only split the index range.
    """
    if replications < 1:
        raise ValueError(f"replications must be >= 1, got {replications}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    backend = _resolve_backend(backend, dist)
    increments = np.asarray(policy.increments, dtype=float)
    n = int(replications)
    if workers <= 1 or n < 2 * workers:
        return _run_kernel(dist, increments, n, seed, 0, backend)
    bounds = [(n * w) // workers for w in range(workers + 1)]
    totals = np.empty(n)
    tiers = np.empty(n, dtype=np.int64)

    def run_chunk(w: int):
        lo, hi = bounds[w], bounds[w + 1]
        t, k = _run_kernel(dist, increments, hi - lo, seed, lo, backend)
        totals[lo:hi] = t
        tiers[lo:hi] = k

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_chunk, range(workers)))
    return totals, tiers


def _estimate(totals: np.ndarray, replications: int, seed: int) -> SimulationEstimate:
    # exact (fsum) aggregation in index order: the estimate is independent
    # of how the totals were partitioned across workers
    n = len(totals)
    mean = math.fsum(totals) / n
    if n > 1:
        var = math.fsum((x - mean) ** 2 for x in totals) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = math.inf
    return SimulationEstimate(mean, stderr, replications, seed)


def estimate_value(
    policy: BadgePolicy,
    dist: MotivationDistribution,
    replications: int,
    seed: int,
    backend: str = "auto",
    workers: int = 1,
) -> SimulationEstimate:
    """Monte Carlo estimate of expected activities under the ladder."""
    totals, _ = simulate_totals(policy, dist, replications, seed, backend, workers)
    return _estimate(totals, replications, seed)


def compare_policies(
    dist: MotivationDistribution,
    policies: Sequence[BadgePolicy],
    replications: int,
    seed: int,
    backend: str = "auto",
    workers: int = 1,
) -> list[SimulationEstimate]:
    """Estimate several ladders under common random numbers.

    Every policy sees the same per-replication substreams, so differences
    between estimates are sharper than their individual standard errors
    suggest, and identical policies produce identical estimates.
    """
    if len(policies) == 0:
        raise ValueError("compare_policies needs at least one policy")
    return [
        estimate_value(p, dist, replications, seed, backend, workers)
        for p in policies
    ]

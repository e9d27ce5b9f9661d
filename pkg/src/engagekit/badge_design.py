"""Optimal badge thresholds under motivation refresh.

The model: a user draws a motivation level V from a prior. A badge ladder
sets K incremental thresholds T_1..T_K (extra work per tier). If the
current draw covers the next increment, the user does exactly that much
work, earns the tier, and redraws; otherwise they do V and leave. After
the last tier they redraw once more and complete that full draw.

The expected total work for one tier at threshold t, given that finishing
it is worth ``continuation`` further expected activities, is

    (t + continuation) * survival(t) + E[V 1{V < t}]

Optimal ladders come from backward recursion over "tiers remaining": each
stage maximizes the expression above with the previous stage's value as
the continuation. For log-concave priors the stage objective has a single
interior critical point, where survival(t)/pdf(t) equals the continuation,
so each stage reduces to a bracketed root find; non-log-concave priors
fall back to a scan plus golden-section refinement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .distributions import MotivationDistribution

__all__ = [
    "BadgePolicy",
    "BadgeDesignSolution",
    "RoundedPolicy",
    "StructureCheck",
    "StructureReport",
    "ROUNDING_MODES",
    "stage_value",
    "optimal_stage_threshold",
    "optimize_thresholds",
    "expected_activities",
    "expected_activities_recursive",
    "verify_structure",
    "round_policy",
]

DEFAULT_TIER_NAMES = ("bronze", "silver", "gold")
ROUNDING_MODES = ("nearest_half_up", "floor", "ceil", "floor_first")

# absolute slack below which a structural property is still considered met
STRUCTURE_TOL = 1e-7
# treat stage objectives flat to within this relative tolerance as ties
_FLAT_TOL = 1e-12


@dataclass(frozen=True)
class BadgePolicy:
    """K incremental thresholds: extra activities required per tier.

    Increments may be zero (a free tier that just refreshes motivation) so
    that arbitrary ladders can be *evaluated*; the optimizer itself only
    returns zero increments in degenerate (memoryless) cases.
    """

    increments: tuple[float, ...]
    tier_names: tuple[str, ...] | None = None

    def __post_init__(self):
        inc = tuple(float(t) for t in self.increments)
        if len(inc) < 1:
            raise ValueError("a badge policy needs at least one tier")
        if any(not math.isfinite(t) or t < 0 for t in inc):
            raise ValueError(f"increments must be finite and >= 0, got {inc}")
        object.__setattr__(self, "increments", inc)
        names = self.tier_names
        if names is None:
            names = DEFAULT_TIER_NAMES if len(inc) == 3 else tuple(
                f"tier_{i + 1}" for i in range(len(inc))
            )
        names = tuple(names)
        if len(names) != len(inc):
            raise ValueError("tier_names length must match increments")
        object.__setattr__(self, "tier_names", names)

    @property
    def tiers(self) -> int:
        return len(self.increments)

    @property
    def cumulative(self) -> tuple[float, ...]:
        """Prefix sums: total work at which each tier is earned."""
        out, acc = [], 0.0
        for t in self.increments:
            acc += t
            out.append(acc)
        return tuple(out)


@dataclass(frozen=True)
class BadgeDesignSolution:
    """Optimizer output: the ladder plus the value of each stage depth.

    ``stage_values[i]`` is the optimal expected number of activities with i
    tiers remaining (index 0 is the bare prior mean, no badge at all);
    ``optimal_value`` equals ``stage_values[-1]``.
    """

    policy: BadgePolicy
    stage_values: tuple[float, ...]
    optimal_value: float


@dataclass(frozen=True)
class RoundedPolicy:
    """Integer ladder for the live platform: per-tier increments + prefix sums."""

    increments: tuple[int, ...]
    cumulative: tuple[int, ...]
    rounding_mode: str

    def __post_init__(self):
        if list(self.cumulative) != [
            sum(self.increments[: i + 1]) for i in range(len(self.increments))
        ]:
            raise ValueError("cumulative must be the prefix sums of increments")
        if any(c2 <= c1 for c1, c2 in zip(self.cumulative, self.cumulative[1:])):
            raise ValueError("cumulative thresholds must be strictly increasing")


def stage_value(dist: MotivationDistribution, continuation: float, t: float) -> float:
    """Expected activities from one tier at threshold t.

    ``continuation`` is the expected further activities unlocked by earning
    the tier (the prior mean when this is the final tier).
    """
    if t < 0 or continuation < 0 or not math.isfinite(t):
        raise ValueError(f"invalid stage input: t={t}, continuation={continuation}")
    return (t + continuation) * float(dist.survival(t)) + dist.truncated_mean_below(t)


def _is_log_concave(dist: MotivationDistribution) -> bool:
    if dist.log_concave_family is not None:
        return dist.log_concave_family
    return dist.check_log_concavity().is_log_concave


def _golden_section_max(f, a: float, b: float, tol: float = 1e-12):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _scan_max(dist: MotivationDistribution, continuation: float):
    """Grid scan plus golden-section refinement; works without log-concavity."""
    lo, _ = dist.support
    hi = dist.quantile(1.0 - 1e-12)
    grid = [lo + (hi - lo) * i / 512 for i in range(513)]
    vals = [stage_value(dist, continuation, t) for t in grid]
    best = max(range(len(grid)), key=lambda i: (vals[i], -i))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    return _golden_section_max(lambda t: stage_value(dist, continuation, t), a, b)


def optimal_stage_threshold(
    dist: MotivationDistribution, continuation: float
) -> tuple[float, float]:
    """Maximize the stage objective; return (threshold, value).

    For log-concave priors the interior optimum is the unique root of
    survival(t) - continuation * pdf(t), located by bisection; boundary
    and flat cases resolve to the smallest maximizer. Non-log-concave
    priors trigger a warning and a scan-based search.
    """
    if not math.isfinite(continuation) or continuation < 0:
        raise ValueError(f"invalid stage input: continuation={continuation}")
    if not _is_log_concave(dist):
        warnings.warn(
            f"{dist.kind} prior is not log-concave; falling back to scan search",
            stacklevel=2,
        )
        return _scan_max(dist, continuation)

    lo, sup_hi = dist.support
    hi = sup_hi if math.isfinite(sup_hi) else dist.quantile(1.0 - 1e-12)

    def slope(t: float) -> float:
        return float(dist.survival(t)) - continuation * float(dist.pdf(t))

    s_lo = slope(lo)
    v_lo = stage_value(dist, continuation, lo)
    if s_lo <= _FLAT_TOL:
        # objective nonincreasing from the support minimum (covers the
        # memoryless flat case); smallest maximizer wins ties
        return lo, v_lo
    s_hi = slope(hi)
    if s_hi > 0.0:
        # objective still rising at the effective upper end
        v_hi = stage_value(dist, continuation, hi)
        if v_lo >= v_hi - _FLAT_TOL * max(1.0, abs(v_hi)):
            return lo, v_lo
        return hi, v_hi
    a, b = lo, hi
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:  # interval no longer shrinks in floats
            break
        if slope(m) > 0.0:
            a = m
        else:
            b = m
    t_star = 0.5 * (a + b)
    return t_star, stage_value(dist, continuation, t_star)


def optimize_thresholds(dist: MotivationDistribution, tiers: int) -> BadgeDesignSolution:
    """Backward recursion over tiers remaining.

    Stage i maximizes the one-tier objective with stage i-1's value as the
    continuation; stage 1's continuation is the bare prior mean. The stage
    computed last is the *first* increment users face, so the collected
    thresholds are reversed into forward order.
    """
    if tiers < 1:
        raise ValueError(f"tiers must be >= 1, got {tiers}")
    values = [dist.mean()]
    thresholds = []
    for _ in range(tiers):
        t, v = optimal_stage_threshold(dist, values[-1])
        thresholds.append(t)
        values.append(v)
    policy = BadgePolicy(tuple(reversed(thresholds)))
    return BadgeDesignSolution(
        policy=policy, stage_values=tuple(values), optimal_value=values[-1]
    )


def expected_activities(dist: MotivationDistribution, policy: BadgePolicy) -> float:
    """Expected total activities for an arbitrary ladder, closed form.

    Sums, tier by tier, the work contributed at each depth weighted by the
    probability of surviving all earlier tiers, plus the terminal redraw
    after the full ladder.
    """
    reach = 1.0  # probability the user faces this tier at all
    total = 0.0
    for t in policy.increments:
        s = float(dist.survival(t))
        total += reach * (dist.truncated_mean_below(t) + t * s)
        reach *= s
    return total + reach * dist.mean()


def expected_activities_recursive(
    dist: MotivationDistribution, policy: BadgePolicy
) -> float:
    """Backward-recursive evaluation of the same quantity.

    Kept as an independent route: tests require it to agree with
    :func:`expected_activities` to 1e-9.
    """
    value = dist.mean()
    for t in reversed(policy.increments):
        value = (t + value) * float(dist.survival(t)) + dist.truncated_mean_below(t)
    return value


@dataclass(frozen=True)
class StructureCheck:
    passed: bool
    slack: float
    detail: str


@dataclass(frozen=True)
class StructureReport:
    """Pass/fail per structural property of an optimal ladder."""

    monotone_increments: StructureCheck
    increment_bound: StructureCheck
    diminishing_gains: StructureCheck

    @property
    def all_passed(self) -> bool:
        return (
            self.monotone_increments.passed
            and self.increment_bound.passed
            and self.diminishing_gains.passed
        )

    def as_dict(self) -> dict:
        # vacuous checks carry infinite slack; JSON shows those as null
        out = {}
        for name in ("monotone_increments", "increment_bound", "diminishing_gains"):
            check: StructureCheck = getattr(self, name)
            out[name] = {
                "passed": check.passed,
                "slack": None if math.isinf(check.slack) else check.slack,
                "detail": check.detail,
            }
        return out


def _increment_bound(dist: MotivationDistribution) -> float:
    """Upper bound on optimal increments: where the hazard reaches 1/mean.

    When 1/mean falls below the hazard's range the stagewise optima sit at
    the support minimum, so that boundary is the bound; above the range
    (not reachable for the supported families) the bound degenerates to
    the support maximum.
    """
    lo, hi = dist.support
    r = 1.0 / dist.mean()
    try:
        return dist.inverse_hazard(r)
    except ValueError:
        h_lo = dist.hazard(lo) if float(dist.survival(lo)) > 0 else math.inf
        return lo if r < h_lo else hi


def verify_structure(
    dist: MotivationDistribution,
    solution: BadgeDesignSolution,
    tol: float = STRUCTURE_TOL,
) -> StructureReport:
    """Check the three structural properties of an optimized ladder.

    (a) increments are nondecreasing, (b) every increment is at most the
    hazard-based bound (independent of the number of tiers), (c) the
    marginal value of each extra tier is nonincreasing. Slack is the
    smallest margin observed; negative slack beyond ``tol`` fails.
    """
    inc = solution.policy.increments
    if len(inc) > 1:
        slack_a = min(b - a for a, b in zip(inc, inc[1:]))
    else:
        slack_a = math.inf
    check_a = StructureCheck(slack_a >= -tol, slack_a, f"increments={inc}")

    bound = _increment_bound(dist)
    slack_b = min(bound - t for t in inc)
    check_b = StructureCheck(slack_b >= -tol, slack_b, f"bound={bound}")

    gains = [
        b - a for a, b in zip(solution.stage_values, solution.stage_values[1:])
    ]
    if len(gains) > 1:
        slack_c = min(a - b for a, b in zip(gains, gains[1:]))
    else:
        slack_c = math.inf
    check_c = StructureCheck(slack_c >= -tol, slack_c, f"gains={tuple(gains)}")

    return StructureReport(check_a, check_b, check_c)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _snap_half_grid(x: float) -> float:
    """Snap values within 1e-9 of a half-integer onto it.

    Optimizer output carries root-finding noise (an exact optimum of 5/2
    can come back as 2.499999999999991); rounding rules are knife-edge at
    half-integers, so resolve near-boundary values to the boundary first.
    """
    nearest = round(2.0 * x) / 2.0
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return nearest
    return x


def round_policy(
    solution: BadgeDesignSolution, mode: str = "nearest_half_up"
) -> RoundedPolicy:
    """Round a continuous ladder to platform-facing integers.

    Modes: nearest_half_up, floor, ceil, and floor_first (floor the first
    increment, round-half-up the rest — the variant that lands the
    pessimistic uniform[0,5] ladder on cumulative thresholds 1/3/6).
    Any increment rounding to 0 is raised to 1 so every tier costs work.
    """
    if mode not in ROUNDING_MODES:
        raise ValueError(f"rounding mode must be one of {ROUNDING_MODES}, got {mode!r}")
    rounded = []
    for i, t in enumerate(solution.policy.increments):
        t = _snap_half_grid(t)
        if mode == "floor":
            r = math.floor(t)
        elif mode == "ceil":
            r = math.ceil(t)
        elif mode == "floor_first":
            r = math.floor(t) if i == 0 else _round_half_up(t)
        else:
            r = _round_half_up(t)
        rounded.append(max(int(r), 1))
    cumulative, acc = [], 0
    for r in rounded:
        acc += r
        cumulative.append(acc)
    return RoundedPolicy(tuple(rounded), tuple(cumulative), mode)

"""Fairness-constrained recommendation plans and carousel sampling.

For each curation period we choose, per user, a probability row over the
participating businesses: the chance each business is shown first in that
user's carousel. The plan maximizes total affinity (how many declared
activity types each user could do with each business, zeroed when the
category is unwanted) subject to a disparate-impact-style guard: the ratio
of minimum to maximum expected first-position impressions across
businesses must be at least a configured fraction (default 4/5).

The program is a linear program over the row-stochastic matrix; the plan
is its exact vertex solution, so runs are deterministic. Carousel orders
beyond the first position come from successive renormalized sampling
without replacement (a Plackett–Luce extension of the first-position
row — a modeling choice, the plan itself only pins position one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import lp as lp_mod
from .catalog import Business, UserProfile

__all__ = [
    "DEFAULT_FAIRNESS_RATIO",
    "FairnessAudit",
    "RecommendationPlan",
    "affinity",
    "affinity_matrix",
    "build_plan_lp",
    "solve_plan",
    "fairness_audit",
    "sample_carousel",
    "plan_to_obj",
    "plan_from_obj",
]

DEFAULT_FAIRNESS_RATIO = 0.8
_AUDIT_TOL = 1e-8


def affinity(user: UserProfile, business: Business) -> int:
    """Activity types the user would do with this business: 0, 1, or 2.

    Counts the overlap of offered and desired activities, zeroed entirely
    when the business category is not among the user's desired categories.
    """
    if business.category not in user.desired_categories:
        return 0
    return len(business.offered_activities & user.desired_activities)


def affinity_matrix(
    users: Sequence[UserProfile], businesses: Sequence[Business]
) -> np.ndarray:
    return np.array(
        [[affinity(u, b) for b in businesses] for u in users], dtype=float
    ).reshape(len(users), len(businesses))


@dataclass(frozen=True)
class FairnessAudit:
    """Min/max expected first-position impressions and their ratio."""

    min_column_sum: float
    max_column_sum: float
    ratio: float
    passed: bool


@dataclass(frozen=True)
class RecommendationPlan:
    """Row-stochastic first-position probabilities for one period."""

    period_id: str
    user_ids: tuple[str, ...]
    business_ids: tuple[str, ...]
    probabilities: np.ndarray  # shape (U, B)
    fairness_ratio_used: float
    audit: FairnessAudit

    def row_for(self, user_id: str) -> np.ndarray:
        try:
            i = self.user_ids.index(user_id)
        except ValueError:
            raise KeyError(f"no plan row for user {user_id!r}") from None
        return self.probabilities[i]


def build_plan_lp(
    users: Sequence[UserProfile],
    businesses: Sequence[Business],
    ratio: float,
    affinities: np.ndarray | None = None,
) -> lp_mod.LinearProgram:
    """Assemble the plan LP: variables x[u, b] flattened user-major.

    One equality row per user (probabilities sum to 1) and one inequality
    per ordered business pair (b, b'): ratio * impressions(b) must not
    exceed impressions(b').
    """
    n_users, n_biz = len(users), len(businesses)
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"fairness ratio must be in (0, 1], got {ratio}")
    if n_users < 1 or n_biz < 2:
        raise ValueError("plan LP needs at least 1 user and 2 businesses")
    if affinities is None:
        affinities = affinity_matrix(users, businesses)
    affinities = np.asarray(affinities, dtype=float)
    if affinities.shape != (n_users, n_biz):
        raise ValueError(
            f"affinity matrix shape {affinities.shape} != ({n_users}, {n_biz})"
        )
    n = n_users * n_biz
    eq = np.zeros((n_users, n))
    for u in range(n_users):
        eq[u, u * n_biz : (u + 1) * n_biz] = 1.0
    ub = np.zeros((n_biz * (n_biz - 1), n))
    row = 0
    for b in range(n_biz):
        for b2 in range(n_biz):
            if b == b2:
                continue
            ub[row, b::n_biz] += ratio
            ub[row, b2::n_biz] -= 1.0
            row += 1
    return lp_mod.LinearProgram(
        objective=affinities.ravel(),
        eq_matrix=eq,
        eq_rhs=np.ones(n_users),
        ub_matrix=ub,
        ub_rhs=np.zeros(n_biz * (n_biz - 1)),
    )


def _audit_matrix(x: np.ndarray, ratio: float) -> FairnessAudit:
    if x.size == 0:
        return FairnessAudit(0.0, 0.0, 1.0, True)
    sums = x.sum(axis=0)
    lo, hi = float(sums.min()), float(sums.max())
    observed = 1.0 if hi <= 0.0 else lo / hi
    return FairnessAudit(lo, hi, observed, observed >= ratio - _AUDIT_TOL)


def solve_plan(
    users: Sequence[UserProfile],
    businesses: Sequence[Business],
    period_id: str,
    ratio: float = DEFAULT_FAIRNESS_RATIO,
) -> RecommendationPlan:
    """Solve the plan LP for the period and attach its fairness audit.

    A single business bypasses the LP (every row is the unit vector); zero
    users produce an empty plan. The LP is always feasible at any ratio
    <= 1 (uniform rows qualify), so a non-optimal status is an internal
    error, not a data error.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"fairness ratio must be in (0, 1], got {ratio}")
    _check_unique_ids(users, businesses)
    n_users, n_biz = len(users), len(businesses)
    if n_biz == 0:
        raise ValueError("cannot plan recommendations with no businesses")
    user_ids = tuple(u.id for u in users)
    business_ids = tuple(b.id for b in businesses)
    if n_users == 0:
        x = np.zeros((0, n_biz))
    elif n_biz == 1:
        x = np.ones((n_users, 1))
    else:
        program = build_plan_lp(users, businesses, ratio)
        solution = lp_mod.solve(program)
        if solution.status != "optimal":
            raise lp_mod.SimplexError(
                f"fairness infeasible: plan LP returned {solution.status}"
            )
        x = solution.x.reshape(n_users, n_biz)
        if x.min() < -1e-9:
            raise lp_mod.SimplexError(
                f"plan LP produced negative probability {x.min()}"
            )
        x = np.maximum(x, 0.0)
    audit = _audit_matrix(x, ratio)
    if n_users and not audit.passed:
        raise lp_mod.SimplexError(
            f"fairness infeasible: audit ratio {audit.ratio} < {ratio}"
        )
    return RecommendationPlan(
        period_id=period_id,
        user_ids=user_ids,
        business_ids=business_ids,
        probabilities=x,
        fairness_ratio_used=float(ratio),
        audit=audit,
    )


def _check_unique_ids(users, businesses):
    seen = set()
    for b in businesses:
        if b.id in seen:
            raise ValueError(f"duplicate business id {b.id!r}")
        seen.add(b.id)
    seen = set()
    for u in users:
        if u.id in seen:
            raise ValueError(f"duplicate user id {u.id!r}")
        seen.add(u.id)


def fairness_audit(plan: RecommendationPlan) -> FairnessAudit:
    """Recompute the audit from the plan matrix (works on loaded plans)."""
    return _audit_matrix(plan.probabilities, plan.fairness_ratio_used)


def sample_carousel(
    plan: RecommendationPlan, user_id: str, rng: np.random.Generator
) -> list[str]:
    """Draw a full carousel ordering for the user.

    Position one follows the plan row exactly; later positions renormalize
    the remaining weights. If the remaining mass is zero the tail is drawn
    uniformly so the result is always a complete permutation.
    """
    row = plan.row_for(user_id)
    remaining = list(range(len(plan.business_ids)))
    order: list[str] = []
    while remaining:
        weights = np.array([row[i] for i in remaining])
        total = float(weights.sum())
        u = float(rng.random())
        if total <= 0.0:
            pick = min(int(u * len(remaining)), len(remaining) - 1)
        else:
            cum = np.cumsum(weights)
            pick = int(np.searchsorted(cum, u * total, side="right"))
            pick = min(pick, len(remaining) - 1)
        order.append(plan.business_ids[remaining.pop(pick)])
    return order


def plan_to_obj(plan: RecommendationPlan) -> dict:
    """plan.json payload (canonical serialization happens in jsonio)."""
    users = []
    for i, uid in enumerate(plan.user_ids):
        probs = {
            bid: float(plan.probabilities[i, j])
            for j, bid in enumerate(plan.business_ids)
        }
        users.append({"id": uid, "probabilities": probs})
    return {
        "period_id": plan.period_id,
        "ratio": plan.fairness_ratio_used,
        "users": users,
        "audit": {
            "min": plan.audit.min_column_sum,
            "max": plan.audit.max_column_sum,
            "ratio": plan.audit.ratio,
        },
    }


def plan_from_obj(obj: dict) -> RecommendationPlan:
    """Rebuild a plan from the plan.json payload."""
    try:
        period_id = obj["period_id"]
        ratio = float(obj["ratio"])
        users = obj["users"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed plan object: missing {exc}") from None
    user_ids = tuple(entry["id"] for entry in users)
    business_ids: tuple[str, ...] = ()
    if users:
        business_ids = tuple(sorted(users[0]["probabilities"]))
        for entry in users:
            if tuple(sorted(entry["probabilities"])) != business_ids:
                raise ValueError(
                    f"plan rows disagree on business ids (user {entry['id']!r})"
                )
    x = np.array(
        [[float(entry["probabilities"][b]) for b in business_ids] for entry in users]
    ).reshape(len(user_ids), len(business_ids))
    audit = _audit_matrix(x, ratio)
    return RecommendationPlan(
        period_id=period_id,
        user_ids=user_ids,
        business_ids=business_ids,
        probabilities=x,
        fairness_ratio_used=ratio,
        audit=audit,
    )

"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see
them all) and then asserts, so a red criterion is both visible and
failing. Tolerances are fixed here, not tuned at runtime.
"""

import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from engagekit.badge_design import (
    BadgePolicy,
    expected_activities,
    optimize_thresholds,
    round_policy,
    verify_structure,
)
from engagekit.badge_sim import estimate_value
from engagekit.catalog import ACTIVITY_TYPES, CATEGORIES, Business, UserProfile
from engagekit.distributions import ExponentialMotivation, UniformMotivation
from engagekit.jsonio import dumps
from engagekit.lp import LinearProgram, check_solution, solve
from engagekit.recommend import (
    affinity_matrix,
    build_plan_lp,
    fairness_audit,
    sample_carousel,
    solve_plan,
)
from engagekit.reports import (
    Period,
    business_report,
    curator_report,
    department_report,
    ingest_events,
    student_report,
)

from _oracles import enumerate_lp_max

DATA = Path(__file__).parent / "data"


def report_criterion(number: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} — {detail}")
    assert passed, f"criterion {number}: {detail}"


def test_criterion_1_uniform_ladder_exact_values():
    t0 = time.perf_counter()
    solution = optimize_thresholds(UniformMotivation(0, 5), 3)
    elapsed = time.perf_counter() - t0
    want_increments = (195 / 128, 15 / 8, 5 / 2)
    want_values = (25 / 8, 445 / 128, 121525 / 32768)
    inc_err = max(
        abs(a - b) for a, b in zip(solution.policy.increments, want_increments)
    )
    val_err = max(
        abs(a - b) for a, b in zip(solution.stage_values[1:], want_values)
    )
    passed = inc_err <= 1e-6 and val_err <= 1e-6 and elapsed < 1.0
    report_criterion(
        1,
        passed,
        f"uniform[0,5] K=3: increment err {inc_err:.2e}, value err {val_err:.2e}, "
        f"runtime {elapsed * 1000:.1f} ms",
    )


def test_criterion_2_floor_first_rounding():
    solution = optimize_thresholds(UniformMotivation(0, 5), 3)
    rounded = round_policy(solution, "floor_first")
    passed = rounded.increments == (1, 2, 3) and rounded.cumulative == (1, 3, 6)
    report_criterion(
        2,
        passed,
        f"floor-first rounding: increments {rounded.increments}, "
        f"cumulative {rounded.cumulative}",
    )


def test_criterion_3_structure_property_suite():
    rng = np.random.default_rng(412)
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(200):
        lo = float(rng.uniform(0.0, 3.0))
        dist = UniformMotivation(lo, lo + float(rng.uniform(0.5, 8.0)))
        k = int(rng.integers(2, 6))
        solution = optimize_thresholds(dist, k)
        structure = verify_structure(dist, solution, tol=1e-7)
        for check in (
            structure.monotone_increments,
            structure.increment_bound,
            structure.diminishing_gains,
        ):
            worst = min(worst, check.slack)
    elapsed = time.perf_counter() - t0
    passed = worst >= -1e-7 and elapsed < 30.0
    report_criterion(
        3,
        passed,
        f"200 uniform(a,b) ladders, K in 2..5: worst slack {worst:.3e}, "
        f"runtime {elapsed:.1f} s",
    )


def test_criterion_4_memorylessness():
    rng = np.random.default_rng(413)
    worst_analytic = 0.0
    worst_sigma = 0.0
    for i in range(100):
        rate = float(rng.uniform(0.2, 4.0))
        dist = ExponentialMotivation(rate)
        k = int(rng.integers(1, 6))
        policy = BadgePolicy(tuple(rng.uniform(0.0, 8.0, size=k)))
        value = expected_activities(dist, policy)
        worst_analytic = max(worst_analytic, abs(value - 1 / rate))
        estimate = estimate_value(policy, dist, 100_000, seed=1000 + i)
        worst_sigma = max(
            worst_sigma, abs(estimate.mean - 1 / rate) / estimate.stderr
        )
    passed = worst_analytic <= 1e-9 and worst_sigma <= 4.0
    report_criterion(
        4,
        passed,
        f"exponential ladders: max |G - 1/rate| = {worst_analytic:.2e}, "
        f"max MC deviation {worst_sigma:.2f} sigma",
    )


def test_criterion_5_simulator_analytic_agreement():
    rng = np.random.default_rng(414)
    t0 = time.perf_counter()
    worst_sigma = 0.0
    for i in range(50):
        if rng.random() < 0.5:
            lo = float(rng.uniform(0.0, 2.0))
            dist = UniformMotivation(lo, lo + float(rng.uniform(1.0, 6.0)))
        else:
            dist = ExponentialMotivation(float(rng.uniform(0.3, 2.5)))
        k = int(rng.integers(1, 5))
        policy = BadgePolicy(tuple(rng.uniform(0.0, 5.0, size=k)))
        analytic = expected_activities(dist, policy)
        estimate = estimate_value(policy, dist, 100_000, seed=2000 + i)
        worst_sigma = max(worst_sigma, abs(estimate.mean - analytic) / estimate.stderr)
    elapsed = time.perf_counter() - t0
    passed = worst_sigma <= 4.0 and elapsed < 60.0
    report_criterion(
        5,
        passed,
        f"50 (prior, ladder) pairs at 1e5 reps: max deviation {worst_sigma:.2f} "
        f"sigma, runtime {elapsed:.1f} s",
    )


def test_criterion_6_lp_correctness():
    rng = np.random.default_rng(415)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 5))
        extra = int(rng.integers(1, 8 - n + 1))
        lp = LinearProgram(
            objective=rng.uniform(-1.0, 2.0, size=n),
            ub_matrix=np.vstack([np.eye(n), rng.uniform(-1, 1, size=(extra, n))]),
            ub_rhs=np.concatenate(
                [rng.uniform(0.5, 3.0, size=n), rng.uniform(0.2, 2.5, size=extra)]
            ),
        )
        solution = solve(lp)
        assert solution.status == "optimal"
        assert check_solution(lp, solution.x, tol=1e-8).passed
        reference = enumerate_lp_max(lp)
        worst = max(worst, abs(solution.objective_value - reference))

    users = [
        UserProfile("u1", frozenset({"food"}), frozenset(ACTIVITY_TYPES)),
        UserProfile("u2", frozenset({"food", "shopping"}), frozenset(ACTIVITY_TYPES)),
    ]
    businesses = [
        Business("b1", "B1", "food", frozenset(ACTIVITY_TYPES)),
        Business("b2", "B2", "shopping", frozenset(ACTIVITY_TYPES)),
    ]
    plan = solve_plan(users, businesses, period_id="acc", ratio=0.8)
    alpha = affinity_matrix(users, businesses)
    objective = float((alpha * plan.probabilities).sum())
    hand_ok = (
        abs(objective - 4.0) <= 1e-8
        and plan.probabilities[1, 0] <= 1 / 9 + 1e-8
    )
    passed = worst <= 1e-8 and hand_ok
    report_criterion(
        6,
        passed,
        f"50 random LPs vs vertex enumeration: max objective gap {worst:.2e}; "
        f"hand instance objective {objective:.10f}, x[u2,b1] = "
        f"{plan.probabilities[1, 0]:.10f}",
    )


def test_criterion_7_fairness_guarantee():
    rng = np.random.default_rng(416)
    worst_ratio = math.inf
    worst_gap = math.inf
    for i in range(100):
        n_users = int(rng.integers(1, 51))
        n_biz = int(rng.integers(2, 11))
        users = []
        for u in range(n_users):
            n_cats = int(rng.integers(0, 5))
            cats = rng.choice(CATEGORIES, size=n_cats, replace=False) if n_cats else []
            n_acts = int(rng.integers(0, 3))
            acts = rng.choice(ACTIVITY_TYPES, size=n_acts, replace=False) if n_acts else []
            users.append(UserProfile(f"u{u}", frozenset(cats), frozenset(acts)))
        businesses = []
        for b in range(n_biz):
            offered = (
                set(ACTIVITY_TYPES)
                if rng.random() < 0.5
                else {ACTIVITY_TYPES[int(rng.integers(0, 2))]}
            )
            businesses.append(
                Business(
                    f"b{b}", f"B{b}", CATEGORIES[int(rng.integers(0, 4))],
                    frozenset(offered),
                )
            )
        plan = solve_plan(users, businesses, period_id=f"acc-{i}", ratio=0.8)
        audit = fairness_audit(plan)
        worst_ratio = min(worst_ratio, audit.ratio)
        alpha = affinity_matrix(users, businesses)
        objective = float((alpha * plan.probabilities).sum())
        uniform_objective = float(alpha.sum() / n_biz)
        worst_gap = min(worst_gap, objective - uniform_objective)
    passed = worst_ratio >= 0.8 - 1e-8 and worst_gap >= -1e-8
    report_criterion(
        7,
        passed,
        f"100 random catalogs (U<=50, B<=10): min audit ratio {worst_ratio:.6f}, "
        f"min (objective - uniform) {worst_gap:.2e}",
    )


def test_criterion_8_carousel_statistics():
    row = np.array([0.2, 0.3, 0.5])
    businesses = [
        Business(f"b{i}", f"B{i}", "food", frozenset({"explore"})) for i in range(3)
    ]
    plan = solve_plan(
        [UserProfile("u", frozenset({"food"}), frozenset({"explore"}))],
        businesses,
        period_id="acc",
    )
    plan = replace(plan, probabilities=row.reshape(1, 3))
    rng = np.random.default_rng(417)
    n = 100_000
    counts = dict.fromkeys(plan.business_ids, 0)
    for _ in range(n):
        counts[sample_carousel(plan, "u", rng)[0]] += 1
    worst_sigma = max(
        abs(counts[bid] / n - p) / math.sqrt(p * (1 - p) / n)
        for bid, p in zip(plan.business_ids, row)
    )
    passed = worst_sigma <= 3.0
    report_criterion(
        8,
        passed,
        f"first-position frequencies over 1e5 draws: max deviation "
        f"{worst_sigma:.2f} sigma",
    )


def test_criterion_9_reporting_golden_determinism():
    period = Period.from_month("2021-08")
    path = DATA / "events_2021-08.jsonl"

    def render() -> str:
        events = ingest_events(path)
        blobs = [
            dumps(curator_report(events, None, period).payload),
            dumps(department_report(events, period).payload),
        ]
        for bid in ("b01", "b05", "b12"):
            blobs.append(dumps(business_report(events, bid, period).payload))
        for uid in ("u001", "u013", "u030"):
            blobs.append(dumps(student_report(events, uid, period).payload))
        return "\n".join(blobs)

    first, second = render(), render()
    events = ingest_events(path)
    curator = curator_report(events, None, period).payload
    dept = department_report(events, period).payload
    in_period = sum(1 for e in events if period.contains(e.timestamp))
    additive = (
        curator["totals"]["event_count"]
        == sum(b["event_count"] for b in curator["businesses"])
        == in_period
        and dept["totals"]["event_count"]
        == sum(d["event_count"] for d in dept["departments"].values())
        == in_period
    )
    passed = first == second and additive
    report_criterion(
        9,
        passed,
        f"fixture reports byte-identical across runs: {first == second}; "
        f"additivity over {in_period} in-period events: {additive}",
    )

"""Engagement toolkit: badge ladders, fair recommendations, period reports.

Three engines behind one deterministic library and CLI:

- badge ladder design: optimal tier thresholds for a motivation prior,
  with a Monte Carlo simulator validating the closed-form values;
- recommendation plans: an exact LP balancing user/business affinity
  against a min/max impression-fairness ratio, plus carousel sampling;
- engagement reporting: event-log ingestion, badge awards, and the four
  period report kinds.
"""

from .badge_design import (
    BadgeDesignSolution,
    BadgePolicy,
    RoundedPolicy,
    expected_activities,
    optimize_thresholds,
    round_policy,
    stage_value,
    verify_structure,
)
from .badge_sim import (
    HAVE_COMPILED_KERNEL,
    SimulationEstimate,
    UserTrajectory,
    compare_policies,
    estimate_value,
    simulate_user,
)
from .catalog import Business, UserProfile
from .distributions import (
    ExponentialMotivation,
    MotivationDistribution,
    UniformMotivation,
    parse_distribution,
)
from .lp import LinearProgram, LpSolution, check_solution, solve
from .recommend import (
    RecommendationPlan,
    affinity,
    fairness_audit,
    sample_carousel,
    solve_plan,
)
from .reports import (
    ActivityEvent,
    BadgeState,
    Period,
    award_badges,
    business_report,
    curator_report,
    department_report,
    ingest_events,
    student_report,
)

__version__ = "0.1.0"

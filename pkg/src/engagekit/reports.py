"""Engagement event ingestion, badge awards, and period reports.

Engagement arrives as a JSONL event log: one completed activity per line
(user, business, activity type, UTC timestamp, optional academic
department). Everything downstream is a pure function of the parsed event
list, so reports are deterministic and reproducible byte-for-byte.

Four report kinds are produced per curation period: per-business, curator
(all businesses plus totals), academic-department breakdowns, and
per-student reports with badge state and volunteer-credit eligibility.
Period bounds are half-open UTC intervals [start, end) so consecutive
periods compose without overlap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable, Iterable, Mapping, Sequence

from .catalog import ACTIVITY_TYPES, Business

__all__ = [
    "ActivityEvent",
    "FamilyBadge",
    "BadgeState",
    "Period",
    "PeriodReport",
    "DEFAULT_THRESHOLDS",
    "TIER_NAMES",
    "ingest_events",
    "award_badges",
    "tier_for_count",
    "business_report",
    "curator_report",
    "department_report",
    "student_report",
]

DEFAULT_THRESHOLDS = (1, 3, 6)  # cumulative activities for bronze/silver/gold
TIER_NAMES = ("none", "bronze", "silver", "gold")

# external follower counts are not observable from the event log; social
# totals below count on-platform social activities only
SOCIAL_PROXY_NOTE = "social counts are on-platform activities (proxy for external follows)"


@dataclass(frozen=True)
class ActivityEvent:
    """One completed explore/social action."""

    user_id: str
    business_id: str
    activity: str
    timestamp: datetime  # timezone-aware UTC
    department: str | None = None

    def __post_init__(self):
        if self.activity not in ACTIVITY_TYPES:
            raise ValueError(
                f"activity must be one of {ACTIVITY_TYPES}, got {self.activity!r}"
            )
        if self.timestamp.tzinfo is None:
            object.__setattr__(
                self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc)
            )
        else:
            object.__setattr__(
                self, "timestamp", self.timestamp.astimezone(timezone.utc)
            )


@dataclass(frozen=True)
class Period:
    """Half-open reporting window [start, end) in UTC."""

    id: str
    start: datetime
    end: datetime

    def __post_init__(self):
        for name in ("start", "end"):
            ts = getattr(self, name)
            if ts.tzinfo is None:
                object.__setattr__(self, name, ts.replace(tzinfo=timezone.utc))
        if not self.start < self.end:
            raise ValueError(f"period start must precede end, got {self}")

    @classmethod
    def from_month(cls, month: str) -> "Period":
        """Build a period from 'YYYY-MM'."""
        try:
            start = datetime.strptime(month, "%Y-%m").replace(tzinfo=timezone.utc)
        except ValueError:
            raise ValueError(f"period must look like YYYY-MM, got {month!r}") from None
        if start.month == 12:
            end = start.replace(year=start.year + 1, month=1)
        else:
            end = start.replace(month=start.month + 1)
        return cls(id=month, start=start, end=end)

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True)
class FamilyBadge:
    completed_count: int
    tier_awarded: str


@dataclass(frozen=True)
class BadgeState:
    """Per-user badge progress for both activity families."""

    user_id: str
    explore: FamilyBadge
    social: FamilyBadge


@dataclass(frozen=True)
class PeriodReport:
    kind: str  # curator | business | department | student
    period_id: str
    payload: dict


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def ingest_events(path) -> list[ActivityEvent]:
    """Parse a JSONL event log: validated, time-sorted, deduplicated.

    Duplicate (user, business, activity) triples keep only the earliest
    event. Malformed lines fail fast with their line number.
    """
    events: list[ActivityEvent] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            try:
                events.append(
                    ActivityEvent(
                        user_id=_expect_str(obj, "user_id"),
                        business_id=_expect_str(obj, "business_id"),
                        activity=_expect_str(obj, "activity"),
                        timestamp=_parse_timestamp(_expect_str(obj, "timestamp")),
                        department=obj.get("department"),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    events.sort(key=lambda e: e.timestamp)  # stable: ties keep file order
    seen: set[tuple[str, str, str]] = set()
    unique: list[ActivityEvent] = []
    for event in events:
        key = (event.user_id, event.business_id, event.activity)
        if key not in seen:
            seen.add(key)
            unique.append(event)
    return unique


def _expect_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} must be a string, got {value!r}")
    return value


def tier_for_count(count: int, thresholds: Sequence[int] = DEFAULT_THRESHOLDS) -> str:
    """Badge tier for a cumulative activity count."""
    ts = _check_thresholds(thresholds)
    tier = "none"
    for threshold, name in zip(ts, TIER_NAMES[1:]):
        if count >= threshold:
            tier = name
    return tier


def _check_thresholds(thresholds: Sequence[int]) -> tuple[int, ...]:
    ts = tuple(int(t) for t in thresholds)
    if len(ts) != 3 or any(b <= a for a, b in zip(ts, ts[1:])) or ts[0] < 1:
        raise ValueError(
            f"thresholds must be 3 strictly increasing integers >= 1, got {thresholds}"
        )
    return ts


def _thresholds_by_family(thresholds) -> dict[str, tuple[int, ...]]:
    if isinstance(thresholds, Mapping):
        return {fam: _check_thresholds(thresholds[fam]) for fam in ACTIVITY_TYPES}
    ts = _check_thresholds(thresholds)
    return {fam: ts for fam in ACTIVITY_TYPES}


def award_badges(
    events: Iterable[ActivityEvent], thresholds=DEFAULT_THRESHOLDS
) -> list[BadgeState]:
    """Cumulative per-user badge state, sorted by user id.

    ``thresholds`` is a 3-tuple applied to both families, or a mapping
    {"explore": (...), "social": (...)}.
    """
    per_family = _thresholds_by_family(thresholds)
    counts: dict[str, dict[str, int]] = {}
    for event in events:
        fam = counts.setdefault(event.user_id, {a: 0 for a in ACTIVITY_TYPES})
        fam[event.activity] += 1
    states = []
    for user_id in sorted(counts):
        fam = counts[user_id]
        states.append(
            BadgeState(
                user_id=user_id,
                explore=FamilyBadge(
                    fam["explore"], tier_for_count(fam["explore"], per_family["explore"])
                ),
                social=FamilyBadge(
                    fam["social"], tier_for_count(fam["social"], per_family["social"])
                ),
            )
        )
    return states


def _in_period(events: Iterable[ActivityEvent], period: Period) -> list[ActivityEvent]:
    return [e for e in events if period.contains(e.timestamp)]


def _counts(events: Sequence[ActivityEvent]) -> dict:
    return {
        "event_count": len(events),
        "explore_count": sum(1 for e in events if e.activity == "explore"),
        "social_count": sum(1 for e in events if e.activity == "social"),
        "distinct_users": len({e.user_id for e in events}),
    }


def _weekly_series(events: Sequence[ActivityEvent], period: Period) -> list[dict]:
    n_weeks = -((period.end - period.start).days // -7)  # ceil
    weeks = [
        {
            "week_start": (period.start + timedelta(days=7 * w)).date().isoformat(),
            "explore": 0,
            "social": 0,
        }
        for w in range(n_weeks)
    ]
    for event in events:
        w = (event.timestamp - period.start).days // 7
        weeks[w][event.activity] += 1
    return weeks


def business_report(
    events: Iterable[ActivityEvent], business_id: str, period: Period
) -> PeriodReport:
    """Engagement received by one business over the period."""
    scoped = [
        e for e in _in_period(events, period) if e.business_id == business_id
    ]
    payload = {
        "business_id": business_id,
        **_counts(scoped),
        "weekly": _weekly_series(scoped, period),
        "no_events": len(scoped) == 0,
        "notes": SOCIAL_PROXY_NOTE,
    }
    return PeriodReport("business", period.id, payload)


def curator_report(
    events: Iterable[ActivityEvent],
    businesses: Sequence[Business] | None,
    period: Period,
) -> PeriodReport:
    """All business reports plus platform totals.

    When no catalog is supplied the business list is inferred from the
    events themselves (zero-activity businesses then cannot appear).
    """
    events = list(events)
    in_period = _in_period(events, period)
    if businesses is not None:
        ids = sorted(b.id for b in businesses)
    else:
        ids = sorted({e.business_id for e in in_period})
    sub_reports = [business_report(in_period, bid, period).payload for bid in ids]
    payload = {
        "totals": _counts(in_period),
        "business_count": len(ids),
        "businesses": sub_reports,
    }
    return PeriodReport("curator", period.id, payload)


def department_report(events: Iterable[ActivityEvent], period: Period) -> PeriodReport:
    """Event counts grouped by academic department ('unknown' when absent)."""
    in_period = _in_period(events, period)
    by_dept: dict[str, list[ActivityEvent]] = {}
    for event in in_period:
        by_dept.setdefault(event.department or "unknown", []).append(event)
    payload = {
        "totals": _counts(in_period),
        "departments": {dept: _counts(evts) for dept, evts in sorted(by_dept.items())},
    }
    return PeriodReport("department", period.id, payload)


def default_credit_predicate(state: BadgeState) -> bool:
    """Volunteer-credit rule used unless the caller supplies one: any gold badge."""
    return "gold" in (state.explore.tier_awarded, state.social.tier_awarded)


def student_report(
    events: Iterable[ActivityEvent],
    user_id: str,
    period: Period,
    thresholds=DEFAULT_THRESHOLDS,
    credit_predicate: Callable[[BadgeState], bool] | None = None,
) -> PeriodReport:
    """One student's engagement, badge state, and credit eligibility.

    Counts are scoped to the period; badge tiers are cumulative over all
    events up to the period's end (badges are never reset by a new period).
    """
    events = list(events)
    mine_period = [e for e in _in_period(events, period) if e.user_id == user_id]
    cumulative = [
        e for e in events if e.user_id == user_id and e.timestamp < period.end
    ]
    states = award_badges(cumulative, thresholds)
    if states:
        state = states[0]
    else:
        state = BadgeState(user_id, FamilyBadge(0, "none"), FamilyBadge(0, "none"))
    predicate = credit_predicate or default_credit_predicate
    payload = {
        "user_id": user_id,
        **_counts(mine_period),
        "badges": {
            "explore": {
                "completed_count": state.explore.completed_count,
                "tier_awarded": state.explore.tier_awarded,
            },
            "social": {
                "completed_count": state.social.completed_count,
                "tier_awarded": state.social.tier_awarded,
            },
        },
        "occ_credit_eligible": bool(predicate(state)),
    }
    del payload["distinct_users"]  # meaningless for a single student
    return PeriodReport("student", period.id, payload)

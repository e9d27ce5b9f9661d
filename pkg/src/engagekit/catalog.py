"""Catalog domain types: participating businesses and registered users.

A curation period carries a catalog of businesses (each in one of four
categories, each offering explore and/or social activities) and the users
who declared category/activity preferences. These records feed both the
recommendation plan and the engagement reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

__all__ = [
    "CATEGORIES",
    "ACTIVITY_TYPES",
    "Business",
    "UserProfile",
    "business_from_obj",
    "user_from_obj",
]

CATEGORIES = ("beauty", "entertainment", "food", "shopping")
ACTIVITY_TYPES = ("explore", "social")


@dataclass(frozen=True)
class Business:
    """One catalog entry for a curation period."""

    id: str
    name: str
    category: str
    offered_activities: frozenset[str]
    links: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("business id must be nonempty")
        if self.category not in CATEGORIES:
            raise ValueError(
                f"business {self.id!r}: category {self.category!r} "
                f"not in {CATEGORIES}"
            )
        offered = frozenset(self.offered_activities)
        if not offered or not offered <= set(ACTIVITY_TYPES):
            raise ValueError(
                f"business {self.id!r}: offered_activities must be a nonempty "
                f"subset of {ACTIVITY_TYPES}, got {sorted(self.offered_activities)}"
            )
        object.__setattr__(self, "offered_activities", offered)


@dataclass(frozen=True)
class UserProfile:
    """A registered user's declared preferences."""

    id: str
    desired_categories: frozenset[str]
    desired_activities: frozenset[str]

    def __post_init__(self):
        if not self.id:
            raise ValueError("user id must be nonempty")
        cats = frozenset(self.desired_categories)
        if not cats <= set(CATEGORIES):
            raise ValueError(
                f"user {self.id!r}: desired_categories must be a subset of "
                f"{CATEGORIES}, got {sorted(self.desired_categories)}"
            )
        acts = frozenset(self.desired_activities)
        if not acts <= set(ACTIVITY_TYPES):
            raise ValueError(
                f"user {self.id!r}: desired_activities must be a subset of "
                f"{ACTIVITY_TYPES}, got {sorted(self.desired_activities)}"
            )
        object.__setattr__(self, "desired_categories", cats)
        object.__setattr__(self, "desired_activities", acts)


def business_from_obj(obj: dict) -> Business:
    """Parse one businesses.json entry."""
    return Business(
        id=_req_str(obj, "id"),
        name=_req_str(obj, "name"),
        category=_req_str(obj, "category"),
        offered_activities=frozenset(_req_str_list(obj, "offered_activities")),
        links=dict(obj.get("links") or {}),
    )


def user_from_obj(obj: dict) -> UserProfile:
    """Parse one users.json entry."""
    return UserProfile(
        id=_req_str(obj, "id"),
        desired_categories=frozenset(_req_str_list(obj, "desired_categories")),
        desired_activities=frozenset(_req_str_list(obj, "desired_activities")),
    )


def _req_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} must be a string, got {value!r}")
    return value


def _req_str_list(obj: dict, key: str) -> list[str]:
    value = obj.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"field {key!r} must be a list of strings, got {value!r}")
    return value

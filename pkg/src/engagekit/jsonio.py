"""Canonical JSON output and catalog file validation.

Every artifact the toolkit writes uses one serialization: keys sorted,
floats at 12 significant digits, 2-space indentation, a trailing newline,
and non-finite numbers rejected. Identical inputs therefore produce
byte-identical files, which is what makes golden-file testing work.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .catalog import ACTIVITY_TYPES, CATEGORIES

__all__ = [
    "dumps",
    "dump_path",
    "load_json",
    "format_float",
    "CatalogValidation",
    "validate_catalogs",
]


def format_float(x: float) -> str:
    """12-significant-digit decimal form of a finite float."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    if x == 0.0:
        return "0"  # avoid '-0'
    return format(x, ".12g")


def dumps(obj, indent: int = 2) -> str:
    """Serialize to canonical JSON (no trailing newline)."""
    pieces: list[str] = []
    _write(obj, pieces, indent, 0)
    return "".join(pieces)


def dump_path(obj, path) -> None:
    """Write canonical JSON plus a trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write(obj, out: list[str], indent: int, depth: int) -> None:
    pad = " " * (indent * (depth + 1))
    closing_pad = " " * (indent * depth)
    if obj is None or obj is True or obj is False:
        out.append("null" if obj is None else "true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(pad)
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(": ")
            _write(obj[key], out, indent, depth + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(closing_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad)
            _write(item, out, indent, depth + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing_pad + "]")
    else:
        # numpy scalars and similar duck-typed numbers
        if hasattr(obj, "item"):
            _write(obj.item(), out, indent, depth)
            return
        raise TypeError(f"cannot serialize {type(obj).__name__}: {obj!r}")


@dataclass
class CatalogValidation:
    """Schema violations found in catalog files, with JSON paths."""

    violations: list[tuple[str, str]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_obj(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"path": path, "message": message}
                for path, message in self.violations
            ],
        }


def validate_catalogs(businesses_path, users_path) -> CatalogValidation:
    """Check catalog files for schema conformance before planning.

    Collects every violation (missing/ill-typed fields, unknown enum
    values, duplicate ids) rather than stopping at the first.
    """
    violations: list[tuple[str, str]] = []
    businesses = _load_array(businesses_path, "businesses", violations)
    users = _load_array(users_path, "users", violations)
    if businesses is not None:
        _validate_entries(
            businesses,
            "businesses",
            violations,
            required={
                "id": str,
                "name": str,
                "category": str,
                "offered_activities": list,
            },
        )
        for i, entry in enumerate(businesses):
            if not isinstance(entry, dict):
                continue
            cat = entry.get("category")
            if isinstance(cat, str) and cat not in CATEGORIES:
                violations.append(
                    (
                        f"businesses[{i}].category",
                        f"{cat!r} is not one of {list(CATEGORIES)}",
                    )
                )
            _validate_activity_list(
                entry.get("offered_activities"),
                f"businesses[{i}].offered_activities",
                violations,
                allow_empty=False,
            )
            links = entry.get("links")
            if links is not None and not isinstance(links, dict):
                violations.append(
                    (f"businesses[{i}].links", "must be an object of handles")
                )
    if users is not None:
        _validate_entries(
            users,
            "users",
            violations,
            required={
                "id": str,
                "desired_categories": list,
                "desired_activities": list,
            },
        )
        for i, entry in enumerate(users):
            if not isinstance(entry, dict):
                continue
            cats = entry.get("desired_categories")
            if isinstance(cats, list):
                for cat in cats:
                    if cat not in CATEGORIES:
                        violations.append(
                            (
                                f"users[{i}].desired_categories",
                                f"{cat!r} is not one of {list(CATEGORIES)}",
                            )
                        )
            _validate_activity_list(
                entry.get("desired_activities"),
                f"users[{i}].desired_activities",
                violations,
                allow_empty=True,
            )
    return CatalogValidation(violations)


def _load_array(path, label, violations):
    try:
        data = load_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        violations.append((label, f"cannot read {path}: {exc}"))
        return None
    if not isinstance(data, list):
        violations.append((label, "top-level value must be an array"))
        return None
    return data


def _validate_entries(entries, label, violations, required):
    seen_ids: set[str] = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            violations.append((f"{label}[{i}]", "entry must be an object"))
            continue
        for key, typ in required.items():
            value = entry.get(key)
            if not isinstance(value, typ):
                violations.append(
                    (
                        f"{label}[{i}].{key}",
                        f"required {typ.__name__}, got {value!r}",
                    )
                )
        entry_id = entry.get("id")
        if isinstance(entry_id, str):
            if entry_id in seen_ids:
                violations.append((f"{label}[{i}].id", f"duplicate id {entry_id!r}"))
            seen_ids.add(entry_id)


def _validate_activity_list(value, path, violations, allow_empty):
    if not isinstance(value, list):
        return  # missing/ill-typed already reported by required-field pass
    for act in value:
        if act not in ACTIVITY_TYPES:
            violations.append(
                (path, f"{act!r} is not one of {list(ACTIVITY_TYPES)}")
            )
    if not allow_empty and not value:
        violations.append((path, "must offer at least one activity type"))

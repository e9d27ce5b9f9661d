import json
import math
from pathlib import Path

import pytest

from engagekit.jsonio import dump_path, dumps, format_float, validate_catalogs

DATA = Path(__file__).parent / "data"


class TestCanonicalDumps:
    def test_keys_sorted(self):
        assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}'

    def test_nested_structures_round_trip(self):
        obj = {"z": [1, 2.5, "x"], "a": {"inner": [True, None]}, "empty": {}, "el": []}
        assert json.loads(dumps(obj)) == obj

    def test_floats_twelve_significant_digits(self):
        assert format_float(1 / 3) == "0.333333333333"
        assert format_float(121525 / 32768) == "3.70864868164"
        assert format_float(2.5) == "2.5"
        assert format_float(1.0) == "1"
        assert format_float(0.0) == "0"
        assert format_float(-0.0) == "0"
        assert format_float(1e-7) == "1e-07"

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            dumps({"x": math.nan})
        with pytest.raises(ValueError):
            dumps({"x": math.inf})

    def test_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            dumps({"x": object()})

    def test_numpy_scalars_unwrap(self):
        import numpy as np

        assert json.loads(dumps({"a": np.float64(0.5), "b": np.int64(3)})) == {
            "a": 0.5,
            "b": 3,
        }

    def test_dump_path_has_trailing_newline(self, tmp_path):
        out = tmp_path / "x.json"
        dump_path({"a": 1}, out)
        text = out.read_text()
        assert text.endswith("}\n")

    def test_byte_identical_across_calls(self):
        obj = {"values": [1 / 3, 2 / 7], "name": "plan"}
        assert dumps(obj) == dumps(obj)


class TestValidateCatalogs:
    def test_fixture_catalogs_are_clean(self):
        result = validate_catalogs(DATA / "businesses.json", DATA / "users.json")
        assert result.ok
        assert result.violations == []

    def test_duplicate_business_id(self, tmp_path):
        biz = tmp_path / "b.json"
        biz.write_text(json.dumps([
            {"id": "b1", "name": "A", "category": "food", "offered_activities": ["social"]},
            {"id": "b1", "name": "B", "category": "food", "offered_activities": ["social"]},
        ]))
        result = validate_catalogs(biz, DATA / "users.json")
        assert not result.ok
        assert any("duplicate id 'b1'" in msg for _, msg in result.violations)

    def test_unknown_category_cites_allowed_set(self, tmp_path):
        biz = tmp_path / "b.json"
        biz.write_text(json.dumps([
            {"id": "b1", "name": "A", "category": "service",
             "offered_activities": ["social"]},
        ]))
        result = validate_catalogs(biz, DATA / "users.json")
        [violation] = [v for v in result.violations if "category" in v[0]]
        assert "service" in violation[1]
        assert "beauty" in violation[1] and "shopping" in violation[1]

    def test_missing_fields_and_bad_activities(self, tmp_path):
        biz = tmp_path / "b.json"
        biz.write_text(json.dumps([
            {"id": "b1", "category": "food", "offered_activities": []},
            {"id": "b2", "name": "B", "category": "food",
             "offered_activities": ["purchase"]},
        ]))
        users = tmp_path / "u.json"
        users.write_text(json.dumps([
            {"id": "u1", "desired_categories": ["cuisine"], "desired_activities": []},
        ]))
        result = validate_catalogs(biz, users)
        paths = [p for p, _ in result.violations]
        assert "businesses[0].name" in paths
        assert "businesses[0].offered_activities" in paths
        assert "businesses[1].offered_activities" in paths
        assert "users[0].desired_categories" in paths

    def test_unreadable_file(self, tmp_path):
        result = validate_catalogs(tmp_path / "missing.json", DATA / "users.json")
        assert not result.ok
        assert result.violations[0][0] == "businesses"

    def test_non_array_top_level(self, tmp_path):
        path = tmp_path / "b.json"
        path.write_text('{"id": "b1"}')
        result = validate_catalogs(path, DATA / "users.json")
        assert any("array" in msg for _, msg in result.violations)

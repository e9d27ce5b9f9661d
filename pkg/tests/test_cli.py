import json
import subprocess
import sys
from pathlib import Path

import pytest

from engagekit.cli import run

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
EVENTS = str(DATA / "events_2021-08.jsonl")


def run_capture(argv, capsys):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def assert_matches_golden(tmp_path, argv, golden_name):
    """Run the command twice: --out must match the golden file byte-for-byte
    and stdout must be the same payload plus a newline."""
    out_file = tmp_path / "out.json"
    code = run(argv + ["--out", str(out_file)])
    assert code == 0
    expected = (GOLDEN / golden_name).read_bytes()
    assert out_file.read_bytes() == expected


class TestUsageAndErrors:
    def test_no_arguments(self, capsys):
        code, out, err = run_capture([], capsys)
        assert code == 1
        assert "usage" in err.lower()
        assert out == ""

    def test_unknown_group(self, capsys):
        code, _, err = run_capture(["frobnicate"], capsys)
        assert code == 1
        assert "usage" in err.lower()

    def test_unknown_flag(self, capsys):
        code, _, err = run_capture(
            ["badges", "optimize", "--dist", "uniform:0,5", "--sideways"], capsys
        )
        assert code == 1

    def test_group_without_command(self, capsys):
        code, _, err = run_capture(["badges"], capsys)
        assert code == 1

    def test_invalid_distribution_literal(self, capsys):
        code, _, err = run_capture(
            ["badges", "optimize", "--dist", "normal:0,1"], capsys
        )
        assert code == 1
        assert "error" in err

    def test_missing_events_file(self, capsys):
        code, _, err = run_capture(
            ["report", "curator", "--events", "nope.jsonl", "--period", "2021-08"],
            capsys,
        )
        assert code == 1

    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            run(["--help"])
        assert exc.value.code == 0


class TestBadgesCli:
    def test_optimize_golden(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["badges", "optimize", "--dist", "uniform:0,5", "--tiers", "3",
             "--round", "floor-first"],
            "badges_optimize_u05.json",
        )

    def test_optimize_payload_values(self, capsys):
        code, out, _ = run_capture(
            ["badges", "optimize", "--dist", "uniform:0,5", "--tiers", "3"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["increments"] == pytest.approx(
            [195 / 128, 15 / 8, 5 / 2], abs=1e-6
        )
        assert payload["stage_values"][1:] == pytest.approx(
            [25 / 8, 445 / 128, 121525 / 32768], abs=1e-6
        )
        assert payload["structure"]["monotone_increments"]["passed"]
        assert payload["rounding_mode"] == "nearest_half_up"

    def test_simulate_golden_python_backend(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["badges", "simulate", "--dist", "uniform:0,5",
             "--thresholds", "1.5234375,1.875,2.5", "--reps", "10000",
             "--seed", "42", "--backend", "python"],
            "badges_simulate_u05.json",
        )

    def test_simulate_seed_echoed(self, capsys):
        code, out, _ = run_capture(
            ["badges", "simulate", "--dist", "exponential:2", "--thresholds", "0.5",
             "--reps", "1000", "--seed", "9"],
            capsys,
        )
        payload = json.loads(out)
        assert payload["seed"] == 9
        assert payload["replications"] == 1000
        assert abs(payload["mean"] - 0.5) < 6 * payload["stderr"]

    def test_byte_identical_runs(self, capsys):
        argv = ["badges", "optimize", "--dist", "uniform:1,10", "--tiers", "3"]
        _, first, _ = run_capture(argv, capsys)
        _, second, _ = run_capture(argv, capsys)
        assert first == second


class TestRecommendCli:
    def test_plan_golden(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["recommend", "plan",
             "--businesses", str(DATA / "businesses_2x2.json"),
             "--users", str(DATA / "users_2x2.json"),
             "--ratio", "0.8", "--period", "2021-08"],
            "plan_2x2.json",
        )

    def test_plan_objective_is_four(self, tmp_path, capsys):
        code, out, _ = run_capture(
            ["recommend", "plan",
             "--businesses", str(DATA / "businesses_2x2.json"),
             "--users", str(DATA / "users_2x2.json"),
             "--ratio", "0.8", "--period", "2021-08"],
            capsys,
        )
        payload = json.loads(out)
        rows = {u["id"]: u["probabilities"] for u in payload["users"]}
        objective = 2 * rows["u1"]["b1"] + 2 * rows["u2"]["b1"] + 2 * rows["u2"]["b2"]
        assert objective == pytest.approx(4.0, abs=1e-9)
        assert rows["u2"]["b1"] <= 1 / 9 + 1e-8

    def test_sample_golden(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["recommend", "sample", "--plan", str(GOLDEN / "plan_2x2.json"),
             "--user", "u2", "--seed", "7"],
            "sample_2x2.json",
        )

    def test_sample_unknown_user(self, capsys):
        code, _, err = run_capture(
            ["recommend", "sample", "--plan", str(GOLDEN / "plan_2x2.json"),
             "--user", "ghost", "--seed", "7"],
            capsys,
        )
        assert code == 1
        assert "no plan row" in err

    def test_audit_golden(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["recommend", "audit", "--plan", str(GOLDEN / "plan_2x2.json")],
            "audit_2x2.json",
        )

    def test_validate_clean_catalogs(self, capsys):
        code, out, _ = run_capture(
            ["recommend", "validate",
             "--businesses", str(DATA / "businesses.json"),
             "--users", str(DATA / "users.json")],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_validate_bad_catalog_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "b.json"
        bad.write_text(json.dumps([
            {"id": "b1", "name": "A", "category": "service",
             "offered_activities": ["social"]},
        ]))
        code, out, _ = run_capture(
            ["recommend", "validate", "--businesses", str(bad),
             "--users", str(DATA / "users.json")],
            capsys,
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["ok"] is False
        assert any("service" in v["message"] for v in payload["violations"])

    def test_plan_refuses_invalid_catalogs(self, tmp_path, capsys):
        bad = tmp_path / "b.json"
        bad.write_text(json.dumps([{"id": "b1"}]))
        code, _, err = run_capture(
            ["recommend", "plan", "--businesses", str(bad),
             "--users", str(DATA / "users.json"),
             "--period", "2021-08"],
            capsys,
        )
        assert code == 1
        assert "catalog validation failed" in err

    def test_plan_on_full_fixture_passes_audit(self, capsys):
        code, out, _ = run_capture(
            ["recommend", "plan",
             "--businesses", str(DATA / "businesses.json"),
             "--users", str(DATA / "users.json"),
             "--period", "2021-09"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["audit"]["ratio"] >= 0.8 - 1e-8


class TestReportCli:
    @pytest.mark.parametrize(
        "argv,golden",
        [
            (["report", "business", "--events", EVENTS, "--period", "2021-08",
              "--business", "b01"], "report_business_b01.json"),
            (["report", "curator", "--events", EVENTS, "--period", "2021-08"],
             "report_curator.json"),
            (["report", "department", "--events", EVENTS, "--period", "2021-08"],
             "report_department.json"),
            (["report", "student", "--events", EVENTS, "--period", "2021-08",
              "--user", "u001"], "report_student_u001.json"),
        ],
        ids=["business", "curator", "department", "student"],
    )
    def test_report_goldens(self, tmp_path, argv, golden):
        assert_matches_golden(tmp_path, argv, golden)

    def test_student_thresholds_flag(self, capsys):
        code, out, _ = run_capture(
            ["report", "student", "--events", EVENTS, "--period", "2021-08",
             "--user", "u001", "--thresholds", "1,2,3"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["payload"]["badges"]["explore"]["tier_awarded"] in (
            "none", "bronze", "silver", "gold"
        )


class TestLpCli:
    def test_solve_golden(self, tmp_path):
        assert_matches_golden(
            tmp_path,
            ["lp", "solve", "--in", str(DATA / "lp_small.json")],
            "lp_small_solution.json",
        )

    def test_solve_reports_infeasible(self, tmp_path, capsys):
        spec = tmp_path / "lp.json"
        spec.write_text(json.dumps(
            {"maximize": [1.0], "ub": {"A": [[1.0]], "b": [-1.0]}}
        ))
        code, out, _ = run_capture(["lp", "solve", "--in", str(spec)], capsys)
        assert code == 0
        assert json.loads(out)["status"] == "infeasible"

    def test_malformed_lp_file(self, tmp_path, capsys):
        spec = tmp_path / "lp.json"
        spec.write_text('{"minimize": [1.0]}')
        code, _, err = run_capture(["lp", "solve", "--in", str(spec)], capsys)
        assert code == 1


class TestConsoleScript:
    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "engagekit.cli", "badges", "optimize",
             "--dist", "uniform:0,5", "--tiers", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["increments"][0] == pytest.approx(2.5, abs=1e-6)
        assert proc.stdout.endswith("\n")

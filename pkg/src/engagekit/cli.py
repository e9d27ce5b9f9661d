"""Unified command-line entry point.

Subcommands: ``badges optimize|simulate``, ``recommend
plan|sample|audit|validate``, ``report business|curator|department|student``,
and ``lp solve``. Payloads go to stdout (or --out) as canonical JSON;
diagnostics go to stderr. Exit codes: 0 success, 1 input/validation error,
2 internal error. Runs are fully determined by flags, input files, and the
seed, and any seed used is echoed in the payload so an artifact can be
reproduced from its own header.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import badge_design, badge_sim, jsonio, lp, recommend, reports
from .catalog import business_from_obj, user_from_obj
from .distributions import parse_distribution

__all__ = ["run", "main"]

_ROUND_CHOICES = {
    "nearest": "nearest_half_up",
    "floor": "floor",
    "ceil": "ceil",
    "floor-first": "floor_first",
}


class _UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting(2)."""

    def error(self, message):
        raise _UsageError(self, message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="engagekit", description=__doc__)
    top = parser.add_subparsers(dest="group", metavar="GROUP")

    badges = top.add_parser("badges", help="badge ladder design and simulation")
    badges_sub = badges.add_subparsers(dest="command", metavar="COMMAND")

    optimize = badges_sub.add_parser("optimize", help="optimal thresholds for a prior")
    optimize.add_argument("--dist", required=True, help="uniform:LO,HI or exponential:RATE")
    optimize.add_argument("--tiers", type=int, default=3)
    optimize.add_argument("--round", dest="round_mode", default="nearest",
                          choices=sorted(_ROUND_CHOICES))
    optimize.add_argument("--json", action="store_true",
                          help="accepted for compatibility; output is always JSON")
    optimize.add_argument("--out", default=None)
    optimize.set_defaults(handler=_cmd_badges_optimize)

    simulate = badges_sub.add_parser("simulate", help="Monte Carlo value of a ladder")
    simulate.add_argument("--dist", required=True)
    simulate.add_argument("--thresholds", required=True,
                          help="comma-separated per-tier increments")
    simulate.add_argument("--reps", type=int, default=100_000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--backend", default="auto",
                          choices=("auto", "compiled", "python"))
    simulate.add_argument("--workers", type=int, default=1)
    simulate.add_argument("--json", action="store_true",
                          help="accepted for compatibility; output is always JSON")
    simulate.add_argument("--out", default=None)
    simulate.set_defaults(handler=_cmd_badges_simulate)

    rec = top.add_parser("recommend", help="fairness-constrained recommendation plans")
    rec_sub = rec.add_subparsers(dest="command", metavar="COMMAND")

    plan = rec_sub.add_parser("plan", help="solve the plan for a curation period")
    plan.add_argument("--businesses", required=True)
    plan.add_argument("--users", required=True)
    plan.add_argument("--ratio", type=float, default=recommend.DEFAULT_FAIRNESS_RATIO)
    plan.add_argument("--period", required=True)
    plan.add_argument("--out", default=None)
    plan.set_defaults(handler=_cmd_recommend_plan)

    sample = rec_sub.add_parser("sample", help="draw one carousel order from a plan")
    sample.add_argument("--plan", required=True)
    sample.add_argument("--user", required=True)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", default=None)
    sample.set_defaults(handler=_cmd_recommend_sample)

    audit = rec_sub.add_parser("audit", help="recompute a plan's fairness audit")
    audit.add_argument("--plan", required=True)
    audit.add_argument("--out", default=None)
    audit.set_defaults(handler=_cmd_recommend_audit)

    validate = rec_sub.add_parser("validate", help="schema-check catalog files")
    validate.add_argument("--businesses", required=True)
    validate.add_argument("--users", required=True)
    validate.add_argument("--out", default=None)
    validate.set_defaults(handler=_cmd_recommend_validate)

    report = top.add_parser("report", help="period engagement reports")
    report_sub = report.add_subparsers(dest="command", metavar="KIND")
    for kind in ("business", "curator", "department", "student"):
        sub = report_sub.add_parser(kind)
        sub.add_argument("--events", required=True, help="JSONL event log")
        sub.add_argument("--period", required=True, help="YYYY-MM")
        sub.add_argument("--out", default=None)
        if kind == "business":
            sub.add_argument("--business", required=True, dest="business_id")
        if kind == "curator":
            sub.add_argument("--businesses", default=None,
                             help="optional catalog to include zero-activity businesses")
        if kind == "student":
            sub.add_argument("--user", required=True, dest="user_id")
            sub.add_argument("--thresholds", default="1,3,6",
                             help="cumulative badge thresholds, e.g. 1,3,6")
        sub.set_defaults(handler=_cmd_report, kind=kind)

    lp_group = top.add_parser("lp", help="standalone linear-program solver")
    lp_sub = lp_group.add_subparsers(dest="command", metavar="COMMAND")
    lp_solve = lp_sub.add_parser("solve", help="solve an LP from a JSON file")
    lp_solve.add_argument("--in", dest="in_path", required=True)
    lp_solve.add_argument("--out", default=None)
    lp_solve.set_defaults(handler=_cmd_lp_solve)

    return parser


def _emit(obj, out_path) -> None:
    if out_path:
        jsonio.dump_path(obj, out_path)
    else:
        sys.stdout.write(jsonio.dumps(obj) + "\n")


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _cmd_badges_optimize(args) -> int:
    dist = parse_distribution(args.dist)
    solution = badge_design.optimize_thresholds(dist, args.tiers)
    rounded = badge_design.round_policy(solution, _ROUND_CHOICES[args.round_mode])
    structure = badge_design.verify_structure(dist, solution)
    _emit(
        {
            "dist": dist.literal(),
            "tiers": args.tiers,
            "increments": list(solution.policy.increments),
            "stage_values": list(solution.stage_values),
            "optimal_value": solution.optimal_value,
            "rounding_mode": rounded.rounding_mode,
            "rounded_increments": list(rounded.increments),
            "cumulative_thresholds": list(rounded.cumulative),
            "structure": structure.as_dict(),
        },
        args.out,
    )
    return 0


def _cmd_badges_simulate(args) -> int:
    dist = parse_distribution(args.dist)
    policy = badge_design.BadgePolicy(
        tuple(_parse_float_list(args.thresholds, "--thresholds"))
    )
    estimate = badge_sim.estimate_value(
        policy, dist, args.reps, args.seed, backend=args.backend, workers=args.workers
    )
    backend = args.backend
    if backend == "auto":
        backend = "compiled" if badge_sim.HAVE_COMPILED_KERNEL else "python"
    _emit(
        {
            "dist": dist.literal(),
            "thresholds": list(policy.increments),
            "replications": estimate.replications,
            "seed": estimate.seed,
            "mean": estimate.mean,
            "stderr": estimate.stderr,
            "backend": backend,
        },
        args.out,
    )
    return 0


def _load_catalogs(businesses_path, users_path):
    validation = jsonio.validate_catalogs(businesses_path, users_path)
    if not validation.ok:
        for path, message in validation.violations:
            print(f"catalog violation at {path}: {message}", file=sys.stderr)
        raise ValueError(
            f"catalog validation failed with {len(validation.violations)} violation(s)"
        )
    businesses = [business_from_obj(o) for o in jsonio.load_json(businesses_path)]
    users = [user_from_obj(o) for o in jsonio.load_json(users_path)]
    return businesses, users


def _cmd_recommend_plan(args) -> int:
    businesses, users = _load_catalogs(args.businesses, args.users)
    plan = recommend.solve_plan(users, businesses, period_id=args.period, ratio=args.ratio)
    _emit(recommend.plan_to_obj(plan), args.out)
    return 0


def _cmd_recommend_sample(args) -> int:
    plan = recommend.plan_from_obj(jsonio.load_json(args.plan))
    rng = np.random.default_rng(args.seed)
    order = recommend.sample_carousel(plan, args.user, rng)
    _emit(
        {
            "period_id": plan.period_id,
            "user": args.user,
            "seed": args.seed,
            "order": order,
        },
        args.out,
    )
    return 0


def _cmd_recommend_audit(args) -> int:
    plan = recommend.plan_from_obj(jsonio.load_json(args.plan))
    audit = recommend.fairness_audit(plan)
    _emit(
        {
            "period_id": plan.period_id,
            "ratio_required": plan.fairness_ratio_used,
            "min": audit.min_column_sum,
            "max": audit.max_column_sum,
            "ratio": audit.ratio,
            "pass": audit.passed,
        },
        args.out,
    )
    return 0


def _cmd_recommend_validate(args) -> int:
    validation = jsonio.validate_catalogs(args.businesses, args.users)
    _emit(validation.as_obj(), args.out)
    return 0 if validation.ok else 1


def _cmd_report(args) -> int:
    events = reports.ingest_events(args.events)
    period = reports.Period.from_month(args.period)
    if args.kind == "business":
        rep = reports.business_report(events, args.business_id, period)
    elif args.kind == "curator":
        businesses = None
        if args.businesses:
            businesses = [business_from_obj(o) for o in jsonio.load_json(args.businesses)]
        rep = reports.curator_report(events, businesses, period)
    elif args.kind == "department":
        rep = reports.department_report(events, period)
    else:
        thresholds = _parse_int_list(args.thresholds, "--thresholds")
        rep = reports.student_report(events, args.user_id, period, thresholds)
    _emit({"kind": rep.kind, "period_id": rep.period_id, "payload": rep.payload}, args.out)
    return 0


def _cmd_lp_solve(args) -> int:
    data = jsonio.load_json(args.in_path)
    if not isinstance(data, dict) or "maximize" not in data:
        raise ValueError("LP file must be an object with a 'maximize' array")
    eq = data.get("eq") or {}
    ub = data.get("ub") or {}
    program = lp.LinearProgram(
        objective=data["maximize"],
        eq_matrix=eq.get("A"),
        eq_rhs=eq.get("b"),
        ub_matrix=ub.get("A"),
        ub_rhs=ub.get("b"),
    )
    solution = lp.solve(program)
    _emit(
        {
            "status": solution.status,
            "x": None if solution.x is None else [float(v) for v in solution.x],
            "objective_value": solution.objective_value,
        },
        args.out,
    )
    return 0


def run(argv) -> int:
    """Dispatch a CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    handler = getattr(args, "handler", None)
    if handler is None:
        # bare 'engagekit' or a group without a command
        parser.print_usage(sys.stderr)
        print("error: missing or incomplete subcommand", file=sys.stderr)
        return 1
    try:
        return handler(args)
    except (ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1
    except lp.SimplexError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line entry point.

Subcommands: ``allocate`` (solve a scenario file, write an allocation CSV),
``verify`` (check an allocation file against a scenario), ``generate``
(sample a scenario from dataset CSVs), ``experiment`` (run a plan and emit
CSVs + plots), ``export-lp`` (write the instance in LP format).

Exit codes: 0 success, 1 infeasible (verify), 2 usage/parse/config error,
3 solver limit hit without a feasible incumbent.  ``EDGEALLOC_SEED`` is the
seed fallback when ``--seed`` is absent.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .exact import ExactSolverConfig
from .geometry import DistanceMetric
from .harness import aggregate, emit_outputs, load_plan, run_experiment
from .lpwriter import write_lp
from .model import Allocation, Scenario, check_feasible
from .scenario import (
    GenerationSpec,
    generate_scenario,
    load_dataset,
    load_scenario,
    save_scenario,
)
from .solvers import SOLVER_NAMES, run_solver

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_NO_INCUMBENT = 3

CLOUD = "cloud"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgealloc",
        description="QoE-maximizing allocation of app users to edge servers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="solve a scenario file and write the allocation")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--solver", required=True, choices=SOLVER_NAMES)
    p.add_argument("--seed", type=int, default=None, help="seed for stochastic solvers")
    p.add_argument("--time-limit", type=float, default=0.0, metavar="SEC",
                   help="exact-solver time limit (0 = unlimited)")
    p.add_argument("--node-limit", type=int, default=0,
                   help="exact-solver node limit (0 = unlimited)")
    p.add_argument("--out", required=True, help="allocation CSV output path")

    p = sub.add_parser("verify", help="check an allocation file against a scenario")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("allocation", help="allocation CSV file")

    p = sub.add_parser("generate", help="sample a scenario from dataset CSVs")
    p.add_argument("--stations", required=True, help="stations CSV (id,lat,lon,radius_m)")
    p.add_argument("--users", required=True, help="users CSV (id,lat,lon)")
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--fraction", type=float, default=0.7,
                   help="fraction of covering servers to retain")
    p.add_argument("--mu", type=float, default=35.0, help="mean capacity per dimension")
    p.add_argument("--sigma", type=float, default=1.0, help="capacity standard deviation")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--metric", choices=[m.value for m in DistanceMetric],
                   default=DistanceMetric.GREAT_CIRCLE.value)
    p.add_argument("--out", required=True, help="scenario JSON output path")

    p = sub.add_parser("experiment", help="run an experiment plan")
    p.add_argument("plan", help="experiment plan JSON file")
    p.add_argument("--stations", required=True)
    p.add_argument("--users", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None,
                   help="override the plan's worker count")

    p = sub.add_parser("export-lp", help="write the instance in LP format")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out", required=True, help="LP output path")

    return parser


def _seed_from(args_seed: int | None) -> int:
    if args_seed is not None:
        return args_seed
    env = os.environ.get("EDGEALLOC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"EDGEALLOC_SEED {env!r} is not an integer") from None
    return 0


def write_allocation(allocation: Allocation, path: str | Path) -> None:
    """CSV with one row per user: ``user_id,server_id,level``.

    Users on the cloud fallback get the literal ``cloud`` with level 0.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "server_id", "level"])
        for uid in sorted(allocation.assignment):
            assigned = allocation.assignment[uid]
            if assigned is None:
                writer.writerow([uid, CLOUD, 0])
            else:
                writer.writerow([uid, assigned[0], assigned[1]])


def read_allocation(path: str | Path, sc: Scenario) -> Allocation:
    """Parse an allocation CSV against a scenario.

    Unknown user or server ids, duplicate rows, missing users and malformed
    fields all raise ``ValueError``.
    """
    user_ids = {u.id for u in sc.users}
    server_ids = {s.id for s in sc.servers}
    q = len(sc.catalog)
    assignment: dict[int, tuple[int, int] | None] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["user_id", "server_id", "level"]:
            raise ValueError(f"{path}:1: expected header user_id,server_id,level")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 fields, got {len(row)}")
            try:
                uid = int(row[0])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: user_id {row[0]!r} is not an integer") from None
            if uid not in user_ids:
                raise ValueError(f"{path}:{line_no}: unknown user id {uid}")
            if uid in assignment:
                raise ValueError(f"{path}:{line_no}: duplicate row for user {uid}")
            if row[1] == CLOUD:
                assignment[uid] = None
                continue
            try:
                sid = int(row[1])
                level = int(row[2])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: malformed server id or level") from None
            if sid not in server_ids:
                raise ValueError(f"{path}:{line_no}: unknown server id {sid}")
            if not 1 <= level <= q:
                raise ValueError(f"{path}:{line_no}: level {level} outside 1..{q}")
            assignment[uid] = (sid, level)
    missing = sorted(user_ids - set(assignment))
    if missing:
        raise ValueError(f"{path}: missing rows for users {missing}")
    return Allocation(assignment)


def cmd_allocate(args) -> int:
    sc = load_scenario(args.scenario)
    seed = _seed_from(args.seed)
    cfg = ExactSolverConfig(time_limit_s=args.time_limit, node_limit=args.node_limit)
    report = run_solver(args.solver, sc, seed=seed, exact_config=cfg)
    violations = check_feasible(report.allocation, sc)
    if violations:
        # a limit interrupted the search before any feasible incumbent
        for v in violations:
            print(v, file=sys.stderr)
        return EXIT_NO_INCUMBENT
    write_allocation(report.allocation, args.out)
    print(f"solver={report.solver}")
    print(f"total_qoe={report.total_qoe!r}")
    print(f"allocated={report.allocated_count}")
    print(f"wall_time_s={report.wall_time_s!r}")
    print(f"optimal={'true' if report.optimal else 'false'}")
    print(f"nodes_explored={report.nodes_explored}")
    if report.rng:
        print(f"rng={report.rng}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = load_scenario(args.scenario)
    allocation = read_allocation(args.allocation, sc)
    violations = check_feasible(allocation, sc)
    for v in violations:
        print(v)
    return EXIT_OK if not violations else EXIT_INFEASIBLE


def cmd_generate(args) -> int:
    dataset = load_dataset(args.stations, args.users)
    spec = GenerationSpec(
        n_users=args.n_users,
        server_fraction=args.fraction,
        capacity_mean=args.mu,
        capacity_stddev=args.sigma,
        seed=_seed_from(args.seed),
        metric=DistanceMetric(args.metric),
    )
    sc = generate_scenario(dataset, spec)
    save_scenario(sc, args.out)
    print(f"scenario written to {args.out}: {sc.n_users} users, {sc.n_servers} servers")
    return EXIT_OK


def cmd_experiment(args) -> int:
    plan = load_plan(args.plan)
    if args.workers is not None:
        from dataclasses import replace

        plan = replace(plan, workers=args.workers)
    dataset = load_dataset(args.stations, args.users)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    flush_path = out_dir / "records.csv"
    with open(flush_path, "w", newline="", encoding="utf-8") as fh:
        from .harness import RECORDS_HEADER

        fh.write(RECORDS_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")

        def flush(rec):
            writer.writerow(rec.csv_row())
            fh.flush()

        records = run_experiment(plan, dataset, on_record=flush)
    summary = aggregate(records)
    written = emit_outputs(summary, records, out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_export_lp(args) -> int:
    sc = load_scenario(args.scenario)
    write_lp(sc, args.out)
    print(f"LP written to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "allocate": cmd_allocate,
    "verify": cmd_verify,
    "generate": cmd_generate,
    "experiment": cmd_experiment,
    "export-lp": cmd_export_lp,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; normalize other codes
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

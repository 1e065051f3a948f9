"""Run the bundled desk-scale experiment sets and emit CSVs + plots.

The three plans under plans/ sweep the population size, the available
server fraction and the mean server capacity, each over 20 repetitions with
all four solvers.  This script runs them (optionally with fewer repetitions
or a subset of plans) and writes records.csv, summary.csv and the per-metric
SVG charts per set into out/<plan name>/.

A full run with the exact solver's 10 s time limit can take a while on the
contended sweep points; start with --reps 3 for a quick look.

Run:  python demos/04_run_experiment_sets.py [--reps N] [--plans set1,set3] [--out DIR]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from edgealloc import aggregate, emit_outputs, load_dataset, load_plan, run_experiment

ROOT = Path(__file__).resolve().parent.parent

parser = argparse.ArgumentParser()
parser.add_argument("--reps", type=int, default=None, help="override plan repetitions")
parser.add_argument("--plans", default="set1,set2,set3", help="comma-separated plan names")
parser.add_argument("--out", default="out", help="output directory")
args = parser.parse_args()

dataset = load_dataset(ROOT / "data/stations.csv", ROOT / "data/users.csv")

for name in args.plans.split(","):
    plan = load_plan(ROOT / "plans" / f"{name.strip()}.json")
    if args.reps:
        plan = replace(plan, repetitions=args.reps)
    print(f"running {plan.name}: sweep {plan.swept_parameter} over "
          f"{list(plan.sweep_values)}, {plan.repetitions} repetitions")

    done = 0

    def progress(record):
        global done
        done += 1
        if done % 40 == 0:
            print(f"  {done} records...")

    records = run_experiment(plan, dataset, on_record=progress)
    summary = aggregate(records)
    out_dir = Path(args.out) / plan.name
    written = emit_outputs(summary, records, out_dir)
    print(f"  wrote {', '.join(p.name for p in written)} to {out_dir}/")

    # quick directional read-out per sweep point
    solvers = list(plan.solvers)
    print(f"  {'value':>8s} " + " ".join(f"{s:>9s}" for s in solvers))
    for value in plan.sweep_values:
        row = []
        for solver in solvers:
            cell = [r for r in summary if r.sweep_value == value and r.solver == solver]
            row.append(f"{cell[0].qoe_mean:9.1f}" if cell else "        -")
        print(f"  {value:>8} " + " ".join(row))

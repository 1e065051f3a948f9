"""Experiment harness: sweep a parameter, run solvers, aggregate, emit files.

An :class:`ExperimentPlan` sweeps one of {n_users, server_fraction,
capacity_mean} while fixing the other two, repeats each point with fresh
user draws, and runs every selected solver on the identical scenario per
(point, repetition) cell.  Per-cell seeds are a stable hash of (base seed,
sweep value, repetition), so a plan plus a dataset fully determines every
deterministic solver's records.  Outputs are ``records.csv`` (one row per
solver run), ``summary.csv`` (mean/stddev per sweep point and solver) and
one SVG line chart per metric.
"""

from __future__ import annotations

import csv
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .exact import ExactSolverConfig
from .scenario import Dataset, GenerationSpec, generate_scenario, scenario_digest
from .solvers import run_solver

RECORDS_HEADER = (
    "experiment,sweep_param,sweep_value,rep,solver,total_qoe,allocated,"
    "wall_time_ms,optimal,seed,scenario_digest"
)

SWEEPABLE = ("n_users", "server_fraction", "capacity_mean")


@dataclass(frozen=True)
class ExperimentPlan:
    """One experiment set: a swept parameter, fixed values, solvers, seeds.

    The field matching ``swept_parameter`` is ignored in favor of
    ``sweep_values``.  With ``measure_time`` off, wall times are recorded as
    zero so repeated runs produce byte-identical records; pair it with an
    exact-solver node limit, since time-based cutoffs are inherently
    run-dependent.
    """

    name: str
    swept_parameter: str
    sweep_values: tuple
    n_users: int = 100
    server_fraction: float = 0.7
    capacity_mean: float = 35.0
    capacity_stddev: float = 1.0
    repetitions: int = 20
    solvers: tuple[str, ...] = ("exact", "greedy", "random", "vsvbp")
    exact_time_limit_s: float = 10.0
    exact_node_limit: int = 0
    base_seed: int = 0
    measure_time: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.swept_parameter not in SWEEPABLE:
            raise ValueError(
                f"swept_parameter must be one of {SWEEPABLE}, got {self.swept_parameter!r}"
            )
        if not self.sweep_values:
            raise ValueError("sweep_values must not be empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.solvers:
            raise ValueError("solvers must not be empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class RunRecord:
    """One solver run on one generated scenario.

    ``error`` is set when the solver raised; such records carry NaN metrics
    and are excluded from aggregation.
    """

    experiment: str
    sweep_param: str
    sweep_value: float | int
    rep: int
    solver: str
    total_qoe: float
    allocated: int
    wall_time_ms: float
    optimal: bool
    seed: int
    scenario_digest: str
    error: str | None = None

    def csv_row(self) -> list[str]:
        return [
            self.experiment,
            self.sweep_param,
            _fmt(self.sweep_value),
            str(self.rep),
            self.solver,
            _fmt(self.total_qoe),
            str(self.allocated),
            _fmt(self.wall_time_ms),
            "true" if self.optimal else "false",
            str(self.seed),
            self.scenario_digest,
        ]


def _fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(x) if isinstance(x, float) else str(x)


def cell_seed(base_seed: int, sweep_value, rep: int) -> int:
    """Stable across platforms and runs; decorrelates cells."""
    text = f"{base_seed}|{sweep_value!r}|{rep}"
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def _cell_spec(plan: ExperimentPlan, sweep_value, rep: int) -> GenerationSpec:
    fixed = {
        "n_users": plan.n_users,
        "server_fraction": plan.server_fraction,
        "capacity_mean": plan.capacity_mean,
    }
    fixed[plan.swept_parameter] = sweep_value
    return GenerationSpec(
        n_users=int(fixed["n_users"]),
        server_fraction=float(fixed["server_fraction"]),
        capacity_mean=float(fixed["capacity_mean"]),
        capacity_stddev=plan.capacity_stddev,
        seed=cell_seed(plan.base_seed, sweep_value, rep),
    )


def _run_cell(plan: ExperimentPlan, dataset: Dataset, sweep_value, rep: int) -> list[RunRecord]:
    spec = _cell_spec(plan, sweep_value, rep)
    sc = generate_scenario(dataset, spec)
    digest = scenario_digest(sc)
    exact_cfg = ExactSolverConfig(
        time_limit_s=plan.exact_time_limit_s, node_limit=plan.exact_node_limit
    )
    records = []
    for solver in plan.solvers:
        try:
            report = run_solver(solver, sc, seed=spec.seed, exact_config=exact_cfg)
            records.append(
                RunRecord(
                    experiment=plan.name,
                    sweep_param=plan.swept_parameter,
                    sweep_value=sweep_value,
                    rep=rep,
                    solver=solver,
                    total_qoe=report.total_qoe,
                    allocated=report.allocated_count,
                    wall_time_ms=report.wall_time_s * 1000.0 if plan.measure_time else 0.0,
                    optimal=report.optimal,
                    seed=spec.seed,
                    scenario_digest=digest,
                )
            )
        except Exception as exc:  # keep the sweep alive; record the failure
            records.append(
                RunRecord(
                    experiment=plan.name,
                    sweep_param=plan.swept_parameter,
                    sweep_value=sweep_value,
                    rep=rep,
                    solver=solver,
                    total_qoe=float("nan"),
                    allocated=0,
                    wall_time_ms=float("nan"),
                    optimal=False,
                    seed=spec.seed,
                    scenario_digest=digest,
                    error=str(exc),
                )
            )
    return records


def run_experiment(
    plan: ExperimentPlan,
    dataset: Dataset,
    on_record: Callable[[RunRecord], None] | None = None,
) -> list[RunRecord]:
    """Run the full sweep; one record per (sweep value, repetition, solver).

    Every solver in a cell sees the identical scenario (equal digests).
    ``on_record`` is called per record in deterministic order, for
    incremental flushing.  With ``plan.workers > 1``, cells run in separate
    processes; results are emitted in plan order regardless of scheduling.
    """
    cells = [(value, rep) for value in plan.sweep_values for rep in range(plan.repetitions)]
    out: list[RunRecord] = []
    if plan.workers == 1:
        for value, rep in cells:
            for rec in _run_cell(plan, dataset, value, rep):
                out.append(rec)
                if on_record:
                    on_record(rec)
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            futures = [pool.submit(_run_cell, plan, dataset, value, rep) for value, rep in cells]
            for future in futures:
                for rec in future.result():
                    out.append(rec)
                    if on_record:
                        on_record(rec)
    return out


@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    sweep_param: str
    sweep_value: float | int
    solver: str
    n_runs: int
    n_failed: int
    qoe_mean: float
    qoe_stddev: float
    allocated_mean: float
    wall_time_ms_mean: float
    wall_time_ms_stddev: float
    optimal_share: float

    def csv_row(self) -> list[str]:
        return [
            self.experiment,
            self.sweep_param,
            _fmt(self.sweep_value),
            self.solver,
            str(self.n_runs),
            str(self.n_failed),
            _fmt(self.qoe_mean),
            _fmt(self.qoe_stddev),
            _fmt(self.allocated_mean),
            _fmt(self.wall_time_ms_mean),
            _fmt(self.wall_time_ms_stddev),
            _fmt(self.optimal_share),
        ]


SUMMARY_HEADER = (
    "experiment,sweep_param,sweep_value,solver,n_runs,n_failed,qoe_mean,"
    "qoe_stddev,allocated_mean,wall_time_ms_mean,wall_time_ms_stddev,optimal_share"
)


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _sample_stddev(xs: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (len(xs) - 1))


def aggregate(records: Sequence[RunRecord]) -> list[SummaryRow]:
    """Per (sweep value, solver) means and sample standard deviations.

    Failed runs are excluded from the statistics and counted in
    ``n_failed``; an all-failed cell gets NaN means.  Raises ``ValueError``
    on an empty record list.
    """
    if not records:
        raise ValueError("no records to aggregate")
    cells: dict[tuple, list[RunRecord]] = {}
    order: list[tuple] = []
    for rec in records:
        key = (rec.experiment, rec.sweep_param, rec.sweep_value, rec.solver)
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(rec)

    rows = []
    for key in order:
        experiment, sweep_param, sweep_value, solver = key
        good = [r for r in cells[key] if r.error is None]
        failed = len(cells[key]) - len(good)
        if good:
            qoes = [r.total_qoe for r in good]
            times = [r.wall_time_ms for r in good]
            row = SummaryRow(
                experiment=experiment,
                sweep_param=sweep_param,
                sweep_value=sweep_value,
                solver=solver,
                n_runs=len(good),
                n_failed=failed,
                qoe_mean=_mean(qoes),
                qoe_stddev=_sample_stddev(qoes),
                allocated_mean=_mean([r.allocated for r in good]),
                wall_time_ms_mean=_mean(times),
                wall_time_ms_stddev=_sample_stddev(times),
                optimal_share=_mean([1.0 if r.optimal else 0.0 for r in good]),
            )
        else:
            nan = float("nan")
            row = SummaryRow(
                experiment=experiment,
                sweep_param=sweep_param,
                sweep_value=sweep_value,
                solver=solver,
                n_runs=0,
                n_failed=failed,
                qoe_mean=nan,
                qoe_stddev=nan,
                allocated_mean=nan,
                wall_time_ms_mean=nan,
                wall_time_ms_stddev=nan,
                optimal_share=nan,
            )
        rows.append(row)
    return rows


def write_records_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(RECORDS_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for rec in records:
            writer.writerow(rec.csv_row())


def write_summary_csv(rows: Iterable[SummaryRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(row.csv_row())


def emit_outputs(
    summary: Sequence[SummaryRow],
    records: Sequence[RunRecord],
    out_dir: str | Path,
) -> list[Path]:
    """Write records.csv, summary.csv and one plot per metric per experiment.

    Plots are SVG line charts, one series per solver, x = sweep value.
    Returns the written paths; raises ``ValueError`` on empty records.
    """
    if not records:
        raise ValueError("no records, nothing to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    records_path = out / "records.csv"
    write_records_csv(records, records_path)
    written.append(records_path)

    summary_path = out / "summary.csv"
    write_summary_csv(summary, summary_path)
    written.append(summary_path)

    failures = [r for r in records if r.error is not None]
    if failures:
        failures_path = out / "failures.log"
        with open(failures_path, "w", encoding="utf-8") as fh:
            for r in failures:
                fh.write(
                    f"{r.experiment} {r.sweep_param}={_fmt(r.sweep_value)} "
                    f"rep={r.rep} solver={r.solver}: {r.error}\n"
                )
        written.append(failures_path)

    for experiment in _unique(r.experiment for r in records):
        exp_rows = [s for s in summary if s.experiment == experiment]
        for metric, label in (("qoe_mean", "total QoE"), ("wall_time_ms_mean", "wall time (ms)")):
            path = out / f"{experiment}_{'total_qoe' if metric == 'qoe_mean' else 'wall_time_ms'}.svg"
            _plot_metric(exp_rows, metric, label, path)
            written.append(path)
    return written


def _unique(items) -> list:
    seen = []
    for x in items:
        if x not in seen:
            seen.append(x)
    return seen


def _plot_metric(rows: Sequence[SummaryRow], metric: str, label: str, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for solver in _unique(r.solver for r in rows):
        series = [r for r in rows if r.solver == solver]
        xs = [r.sweep_value for r in series]
        ys = [getattr(r, metric) for r in series]
        ax.plot(xs, ys, marker="o", label=solver)
    if rows:
        ax.set_xlabel(rows[0].sweep_param)
        ax.set_title(rows[0].experiment)
    ax.set_ylabel(label)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# -- plan files ---------------------------------------------------------------

def plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "name": plan.name,
        "swept_parameter": plan.swept_parameter,
        "sweep_values": list(plan.sweep_values),
        "n_users": plan.n_users,
        "server_fraction": plan.server_fraction,
        "capacity_mean": plan.capacity_mean,
        "capacity_stddev": plan.capacity_stddev,
        "repetitions": plan.repetitions,
        "solvers": list(plan.solvers),
        "exact_time_limit_s": plan.exact_time_limit_s,
        "exact_node_limit": plan.exact_node_limit,
        "base_seed": plan.base_seed,
        "measure_time": plan.measure_time,
        "workers": plan.workers,
    }


def plan_from_dict(doc: dict) -> ExperimentPlan:
    try:
        return ExperimentPlan(
            name=doc["name"],
            swept_parameter=doc["swept_parameter"],
            sweep_values=tuple(doc["sweep_values"]),
            n_users=doc.get("n_users", 100),
            server_fraction=doc.get("server_fraction", 0.7),
            capacity_mean=doc.get("capacity_mean", 35.0),
            capacity_stddev=doc.get("capacity_stddev", 1.0),
            repetitions=doc.get("repetitions", 20),
            solvers=tuple(doc.get("solvers", ("exact", "greedy", "random", "vsvbp"))),
            exact_time_limit_s=doc.get("exact_time_limit_s", 10.0),
            exact_node_limit=doc.get("exact_node_limit", 0),
            base_seed=doc.get("base_seed", 0),
            measure_time=doc.get("measure_time", True),
            workers=doc.get("workers", 1),
        )
    except KeyError as exc:
        raise ValueError(f"experiment plan is missing field {exc}") from None


def load_plan(path: str | Path) -> ExperimentPlan:
    import json

    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: not an experiment plan")
    return plan_from_dict(doc)


def save_plan(plan: ExperimentPlan, path: str | Path) -> None:
    import json

    Path(path).write_text(
        json.dumps(plan_to_dict(plan), indent=2) + "\n", encoding="utf-8"
    )

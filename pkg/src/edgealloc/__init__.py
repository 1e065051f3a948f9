"""QoE-maximizing allocation of app users to edge servers.

Users inside the coverage disks of capacity-limited edge servers are
assigned a server and a discrete service tier; each tier earns a logistic
satisfaction (QoE) value and consumes a vector of resources.  The package
provides an exact branch-and-bound solver, a greedy heuristic, two
baselines, an exhaustive oracle for small instances, a scenario generator
over geographic datasets, and an experiment harness.
"""

from .exact import ExactSolverConfig, solve_exact
from .geometry import DistanceMetric, candidate_servers, coverable_users, distance
from .harness import (
    ExperimentPlan,
    RunRecord,
    SummaryRow,
    aggregate,
    emit_outputs,
    load_plan,
    run_experiment,
    save_plan,
)
from .lpwriter import build_lp, write_lp
from .model import (
    Allocation,
    EdgeServer,
    QoEParams,
    QoSCatalog,
    QoSLevel,
    ResourceVector,
    Scenario,
    SolverReport,
    User,
    Violation,
    check_feasible,
    default_catalog,
    default_qoe_params,
    qoe_of_demand,
    qoe_of_user,
    score,
)
from .scenario import (
    Dataset,
    GenerationSpec,
    generate_scenario,
    load_dataset,
    load_scenario,
    save_scenario,
    scenario_digest,
    validate_geometry,
)
from .solvers import (
    SOLVER_NAMES,
    run_solver,
    solve_greedy,
    solve_oracle,
    solve_random,
    solve_vsvbp,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Dataset",
    "DistanceMetric",
    "EdgeServer",
    "ExactSolverConfig",
    "ExperimentPlan",
    "GenerationSpec",
    "QoEParams",
    "QoSCatalog",
    "QoSLevel",
    "ResourceVector",
    "RunRecord",
    "Scenario",
    "SolverReport",
    "SummaryRow",
    "User",
    "Violation",
    "SOLVER_NAMES",
    "aggregate",
    "build_lp",
    "candidate_servers",
    "check_feasible",
    "coverable_users",
    "default_catalog",
    "default_qoe_params",
    "distance",
    "emit_outputs",
    "generate_scenario",
    "load_dataset",
    "load_plan",
    "load_scenario",
    "qoe_of_demand",
    "qoe_of_user",
    "run_experiment",
    "run_solver",
    "save_plan",
    "save_scenario",
    "scenario_digest",
    "score",
    "solve_exact",
    "solve_greedy",
    "solve_oracle",
    "solve_random",
    "solve_vsvbp",
    "validate_geometry",
    "write_lp",
]

"""All four allocation methods on one sampled city scenario.

Samples 80 users from the bundled downtown dataset under moderate capacity,
runs the exact solver (with a time limit), the greedy heuristic and the two
baselines on the identical scenario, verifies every allocation, and prints
a comparison table.

Run:  python demos/03_solver_faceoff.py [seed]
"""

import sys
from pathlib import Path

from edgealloc import (
    ExactSolverConfig,
    GenerationSpec,
    check_feasible,
    generate_scenario,
    load_dataset,
    run_solver,
)

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 7
data = Path(__file__).resolve().parent.parent / "data"

dataset = load_dataset(data / "stations.csv", data / "users.csv")
scenario = generate_scenario(
    dataset,
    GenerationSpec(n_users=80, server_fraction=0.7, capacity_mean=15.0, seed=seed),
)
covered = sum(1 for u in scenario.users if u.candidate_servers)
print(f"scenario: {scenario.n_users} users ({covered} covered), "
      f"{scenario.n_servers} servers, capacity ~15 per dimension, seed {seed}")
print()
print(f"{'solver':8s} {'total QoE':>10s} {'allocated':>10s} {'time':>9s}  optimal")

exact_cfg = ExactSolverConfig(time_limit_s=10.0)
for name in ("exact", "greedy", "random", "vsvbp"):
    report = run_solver(name, scenario, seed=seed, exact_config=exact_cfg)
    assert check_feasible(report.allocation, scenario) == []
    print(f"{name:8s} {report.total_qoe:10.2f} {report.allocated_count:10d} "
          f"{report.wall_time_s * 1e3:7.1f}ms  {report.optimal}")

print()
print("every allocation above passed the feasibility check; the exact row")
print("is a proven optimum when its optimal flag is True, otherwise the")
print("best incumbent found inside the time limit")

"""Branch-and-bound solver: optimality, soundness, determinism, limits."""

import numpy as np
import pytest

from edgealloc import ExactSolverConfig, check_feasible, solve_exact, solve_oracle
from edgealloc.solvers import solve_greedy, solve_random, solve_vsvbp
from helpers import contention_scenario, motivating_instance, planar_scenario, random_scenario


class TestExactBasics:
    def test_motivating_instance_balances_both_users(self):
        sc = motivating_instance()
        report = solve_exact(sc)
        assert report.total_qoe == pytest.approx(8.18, abs=0.01)
        assert report.allocation.assignment[7] == (4, 2)
        assert report.allocation.assignment[8] == (4, 2)
        assert report.optimal

    def test_zero_servers_is_trivially_optimal(self):
        sc = planar_scenario(users=[(1, (0.0, 0.0)), (2, (1.0, 0.0))], servers=[])
        report = solve_exact(sc)
        assert report.total_qoe == 0.0
        assert report.optimal
        assert all(a is None for a in report.allocation.assignment.values())

    def test_zero_users(self):
        sc = planar_scenario(users=[], servers=[(1, (0.0, 0.0), 1.0, (9, 9, 9, 9))])
        report = solve_exact(sc)
        assert report.total_qoe == 0.0
        assert report.optimal

    def test_rejects_oversized_instances(self):
        # built directly so the guard is hit without deriving 3M candidate sets
        from edgealloc import DistanceMetric, EdgeServer, ResourceVector, Scenario, User
        from edgealloc import default_catalog, default_qoe_params

        users = tuple(User(id=i, position=(0.0, 0.0)) for i in range(1, 1202))
        servers = tuple(
            EdgeServer(id=j, position=(9e6, 9e6), radius=0.0, capacity=ResourceVector((9, 9, 9, 9)))
            for j in range(1, 2800)
        )
        sc = Scenario(
            users=users,
            servers=servers,
            catalog=default_catalog(),
            qoe_params=default_qoe_params(),
            metric=DistanceMetric.PLANAR,
        )
        with pytest.raises(ValueError, match="too large"):
            solve_exact(sc)

    def test_deterministic_for_fixed_scenario(self):
        sc = contention_scenario(np.random.default_rng(31), n=25, m=4)
        a = solve_exact(sc, ExactSolverConfig(node_limit=400))
        b = solve_exact(sc, ExactSolverConfig(node_limit=400))
        assert a.allocation.assignment == b.allocation.assignment
        assert a.total_qoe == b.total_qoe
        assert a.nodes_explored == b.nodes_explored


class TestOracleEquivalence:
    def test_matches_oracle_on_random_small_instances(self):
        rng = np.random.default_rng(37)
        for trial in range(60):
            sc = random_scenario(rng, n_max=6, m_max=3, q_max=3)
            exact = solve_exact(sc, ExactSolverConfig(validate_bounds=True))
            oracle = solve_oracle(sc)
            assert exact.optimal
            assert exact.total_qoe == pytest.approx(oracle.total_qoe, abs=1e-9), (
                f"trial {trial}: exact {exact.total_qoe} != oracle {oracle.total_qoe}"
            )
            assert check_feasible(exact.allocation, sc) == []


class TestBoundsAndLimits:
    def test_bound_soundness_assertions_hold_under_contention(self):
        rng = np.random.default_rng(41)
        proven = 0
        for _ in range(12):
            sc = contention_scenario(rng, n=12, m=3)
            report = solve_exact(
                sc, ExactSolverConfig(node_limit=30_000, validate_bounds=True)
            )
            proven += report.optimal
            assert check_feasible(report.allocation, sc) == []
        assert proven >= 8  # most tight instances still close

    def test_node_limit_returns_feasible_incumbent(self):
        sc = contention_scenario(np.random.default_rng(43), n=40, m=5)
        report = solve_exact(sc, ExactSolverConfig(node_limit=5))
        assert not report.optimal
        assert check_feasible(report.allocation, sc) == []
        assert report.nodes_explored <= 5

    def test_time_limit_returns_feasible_incumbent(self):
        sc = contention_scenario(np.random.default_rng(44), n=60, m=6)
        report = solve_exact(sc, ExactSolverConfig(time_limit_s=0.05))
        assert check_feasible(report.allocation, sc) == []

    def test_gap_tolerance_keeps_result_within_gap(self):
        rng = np.random.default_rng(45)
        for _ in range(10):
            sc = random_scenario(rng, n_max=6, m_max=3)
            loose = solve_exact(sc, ExactSolverConfig(gap_tolerance=0.5))
            tight = solve_exact(sc)
            assert tight.optimal
            assert loose.total_qoe >= tight.total_qoe - 0.5 - 1e-9
            assert loose.total_qoe <= tight.total_qoe + 1e-9

    def test_incumbent_dominates_heuristics_when_proven(self):
        rng = np.random.default_rng(47)
        seen = 0
        for trial in range(40):
            sc = random_scenario(rng, n_max=12, m_max=4)
            exact = solve_exact(sc, ExactSolverConfig(node_limit=20_000))
            if not exact.optimal:
                continue
            seen += 1
            for other in (
                solve_greedy(sc),
                solve_random(sc, seed=trial),
                solve_vsvbp(sc, seed=trial),
            ):
                assert exact.total_qoe >= other.total_qoe - 1e-9
        assert seen >= 30  # the bound proves most small instances


class TestCapacityMonotonicity:
    def test_growing_capacity_never_lowers_the_optimum(self):
        rng = np.random.default_rng(53)
        for _ in range(25):
            sc = random_scenario(rng, n_max=5, m_max=2, cap_max=10)
            if not sc.servers:
                continue
            before = solve_exact(sc).total_qoe
            grown = planar_scenario(
                users=[(u.id, u.position) for u in sc.users],
                servers=[
                    (
                        s.id,
                        s.position,
                        s.radius,
                        tuple(c + int(rng.integers(0, 5)) for c in s.capacity.components),
                    )
                    for s in sc.servers
                ],
                catalog=sc.catalog,
                params=sc.qoe_params,
            )
            after = solve_exact(grown).total_qoe
            assert after >= before - 1e-9

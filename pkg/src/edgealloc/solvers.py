"""Allocation methods: greedy, random, packing baseline, exhaustive oracle.

All four are deterministic given the scenario (and seed, for the stochastic
ones).  Heuristics process users in the scenario's stated order.  Stochastic
methods draw from a named, seedable generator (numpy PCG64) whose identifier
is recorded on the report, so runs replicate across platforms.

``solve_exact`` lives in :mod:`edgealloc.exact`; :func:`run_solver`
dispatches by name across all five methods.
"""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from .model import (
    Allocation,
    Scenario,
    SolverReport,
    _le_scalar,
    make_report,
)

RNG_NAME = "numpy-pcg64"

#: Names accepted by :func:`run_solver`.
SOLVER_NAMES = ("exact", "greedy", "random", "vsvbp", "oracle")


def _demand_tuples(sc: Scenario) -> list[tuple]:
    return [lvl.demand.components for lvl in sc.catalog.levels]


def _fits(demand: tuple, remaining: Sequence) -> bool:
    return all(_le_scalar(d, r) for d, r in zip(demand, remaining))


def _consume(remaining: list, demand: tuple) -> None:
    for k, d in enumerate(demand):
        remaining[k] -= d


def _highest_fitting(demands: list[tuple], remaining: Sequence) -> int:
    """1-based index of the highest tier fitting ``remaining``, or 0."""
    for l in range(len(demands), 0, -1):
        if _fits(demands[l - 1], remaining):
            return l
    return 0


def solve_greedy(sc: Scenario) -> SolverReport:
    """One-pass heuristic: most-headroom server, then the highest tier that fits.

    For each user (input order) the candidate servers still able to host the
    lowest tier are ranked by remaining headroom — the sum over dimensions of
    remaining capacity divided by initial capacity, so no single unit
    dominates — with ties going to the lowest server id.  The user gets the
    highest tier that fits the chosen server.  Users fitting nowhere stay on
    the cloud.
    """
    t0 = time.perf_counter()
    demands = _demand_tuples(sc)
    w1 = demands[0]
    remaining = {s.id: list(s.capacity.components) for s in sc.servers}
    initial = {s.id: s.capacity.components for s in sc.servers}

    def headroom(sid: int) -> float:
        init = initial[sid]
        return sum(
            rem / cap for rem, cap in zip(remaining[sid], init) if cap > 0
        )

    assignment: dict[int, tuple[int, int] | None] = {}
    for u in sc.users:
        fitting = [sid for sid in sorted(u.candidate_servers) if _fits(w1, remaining[sid])]
        if not fitting:
            assignment[u.id] = None
            continue
        sid = min(fitting, key=lambda s: (-headroom(s), s))
        level = _highest_fitting(demands, remaining[sid])
        assignment[u.id] = (sid, level)
        _consume(remaining[sid], demands[level - 1])

    return make_report(
        "greedy", Allocation(assignment), sc, time.perf_counter() - t0, optimal=False
    )


def solve_random(sc: Scenario, seed: int = 0) -> SolverReport:
    """Random baseline: uniform server with room, then a uniform feasible tier.

    Each user (input order) goes to a uniformly chosen candidate server that
    can still host the lowest tier; its level is drawn uniformly between tier
    1 and the highest tier fitting that server's remaining capacity.
    """
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(seed))
    demands = _demand_tuples(sc)
    w1 = demands[0]
    remaining = {s.id: list(s.capacity.components) for s in sc.servers}

    assignment: dict[int, tuple[int, int] | None] = {}
    for u in sc.users:
        fitting = [sid for sid in sorted(u.candidate_servers) if _fits(w1, remaining[sid])]
        if not fitting:
            assignment[u.id] = None
            continue
        sid = fitting[int(rng.integers(len(fitting)))]
        lmax = _highest_fitting(demands, remaining[sid])
        level = 1 + int(rng.integers(lmax))
        assignment[u.id] = (sid, level)
        _consume(remaining[sid], demands[level - 1])

    return make_report(
        "random",
        Allocation(assignment),
        sc,
        time.perf_counter() - t0,
        optimal=False,
        rng=RNG_NAME,
    )


def solve_vsvbp(sc: Scenario, seed: int = 0) -> SolverReport:
    """Vector bin-packing baseline: preset tiers, then pack to allocate many.

    Tiers are preset uniformly at random per user before any packing.  Users
    are then packed hardest-first (fewest candidate servers first): each goes
    onto an already-open candidate server with room, best-fit by smallest
    normalized residual; failing that, the candidate server with the largest
    capacity is opened.  A user whose preset tier fits nowhere stays on the
    cloud.  Allocated count comes first, opened-server count second; total
    QoE is not optimized.
    """
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(seed))
    demands = _demand_tuples(sc)
    q = len(demands)
    preset = {u.id: 1 + int(rng.integers(q)) for u in sc.users}

    remaining = {s.id: list(s.capacity.components) for s in sc.servers}
    initial = {s.id: s.capacity.components for s in sc.servers}
    opened: set[int] = set()

    def residual(sid: int, demand: tuple) -> float:
        init = initial[sid]
        return sum(
            (rem - d) / cap
            for rem, d, cap in zip(remaining[sid], demand, init)
            if cap > 0
        )

    order = sorted(range(len(sc.users)), key=lambda i: (len(sc.users[i].candidate_servers), i))
    assignment: dict[int, tuple[int, int] | None] = {}
    for i in order:
        u = sc.users[i]
        demand = demands[preset[u.id] - 1]
        cands = sorted(u.candidate_servers)
        open_fit = [sid for sid in cands if sid in opened and _fits(demand, remaining[sid])]
        if open_fit:
            sid = min(open_fit, key=lambda s: (residual(s, demand), s))
        else:
            closed_fit = [sid for sid in cands if sid not in opened and _fits(demand, remaining[sid])]
            if not closed_fit:
                assignment[u.id] = None
                continue
            sid = min(closed_fit, key=lambda s: (-sum(initial[s]), s))
            opened.add(sid)
        assignment[u.id] = (sid, preset[u.id])
        _consume(remaining[sid], demand)

    return make_report(
        "vsvbp",
        Allocation(assignment),
        sc,
        time.perf_counter() - t0,
        optimal=False,
        rng=RNG_NAME,
    )


ORACLE_ENUMERATION_LIMIT = 10**8


def solve_oracle(sc: Scenario) -> SolverReport:
    """Exhaustive ground truth for small instances.

    Enumerates every per-user choice — cloud fallback or (candidate server,
    tier) — keeping the best feasible allocation; ties go to the
    lexicographically smallest assignment vector in user-id order with the
    cloud option ordered first.  Refuses instances where
    ``(servers * tiers + 1) ** users`` exceeds ``ORACLE_ENUMERATION_LIMIT``.
    """
    t0 = time.perf_counter()
    n, m, q = sc.n_users, sc.n_servers, len(sc.catalog)
    if (m * q + 1) ** n > ORACLE_ENUMERATION_LIMIT:
        raise ValueError(
            f"instance too large to enumerate: (m*q+1)^n = {(m * q + 1) ** n:g} "
            f"> {ORACLE_ENUMERATION_LIMIT:g}"
        )

    demands = _demand_tuples(sc)
    qoes = [lvl.qoe for lvl in sc.catalog.levels]
    # users with no candidate server are forced onto the cloud; DFS depth is
    # bounded by the branching users alone (<= log2 of the enumeration limit)
    branching = sorted((u for u in sc.users if u.candidate_servers), key=lambda u: u.id)
    nb = len(branching)
    # per-user options: cloud first, then (server, level) ascending, so the
    # first maximum found is the lexicographically smallest assignment vector
    options: list[list[tuple[tuple[int, int] | None, float, tuple | None]]] = []
    for u in branching:
        opts: list[tuple[tuple[int, int] | None, float, tuple | None]] = [(None, 0.0, None)]
        for sid in sorted(u.candidate_servers):
            for l in range(1, q + 1):
                opts.append(((sid, l), qoes[l - 1], demands[l - 1]))
        options.append(opts)

    remaining = {s.id: list(s.capacity.components) for s in sc.servers}
    best_value = -1.0
    best_choice: list[tuple[int, int] | None] = [None] * nb
    current: list[tuple[int, int] | None] = [None] * nb
    leaves = 0

    def descend(i: int, value: float) -> None:
        nonlocal best_value, leaves
        if i == nb:
            leaves += 1
            if value > best_value:
                best_value = value
                best_choice[:] = current
            return
        for assigned, gain, demand in options[i]:
            if demand is not None:
                rem = remaining[assigned[0]]
                if not _fits(demand, rem):
                    continue
                _consume(rem, demand)
                current[i] = assigned
                descend(i + 1, value + gain)
                for k, d in enumerate(demand):
                    rem[k] += d
            else:
                current[i] = None
                descend(i + 1, value + gain)
        current[i] = None

    descend(0, 0.0)
    assignment: dict[int, tuple[int, int] | None] = {u.id: None for u in sc.users}
    for u, choice in zip(branching, best_choice):
        assignment[u.id] = choice
    return make_report(
        "oracle",
        Allocation(assignment),
        sc,
        time.perf_counter() - t0,
        optimal=True,
        nodes_explored=leaves,
    )


def run_solver(
    name: str,
    sc: Scenario,
    seed: int = 0,
    exact_config: "ExactSolverConfig | None" = None,
) -> SolverReport:
    """Dispatch a solver by name (one of :data:`SOLVER_NAMES`)."""
    from .exact import solve_exact

    if name == "exact":
        return solve_exact(sc, exact_config) if exact_config else solve_exact(sc)
    if name == "greedy":
        return solve_greedy(sc)
    if name == "random":
        return solve_random(sc, seed)
    if name == "vsvbp":
        return solve_vsvbp(sc, seed)
    if name == "oracle":
        return solve_oracle(sc)
    raise ValueError(f"unknown solver {name!r}; expected one of {SOLVER_NAMES}")

"""Shared builders for the test suite: canonical instances and random fuzz."""

from __future__ import annotations

import numpy as np

from edgealloc import (
    DistanceMetric,
    EdgeServer,
    QoEParams,
    QoSCatalog,
    ResourceVector,
    Scenario,
    User,
    default_catalog,
    default_qoe_params,
)
from edgealloc.geometry import candidate_servers

DEMO_LEVELS = ((1, 2, 1, 2), (2, 3, 3, 4), (5, 7, 6, 6))


def planar_scenario(users, servers, catalog=None, params=None, seed=0) -> Scenario:
    """Assemble a planar scenario, deriving candidate sets from geometry.

    ``users`` are (id, (x, y)) pairs; ``servers`` are
    (id, (x, y), radius, capacity tuple).
    """
    params = params or default_qoe_params()
    catalog = catalog or default_catalog(params)
    built_servers = tuple(
        EdgeServer(id=sid, position=pos, radius=radius, capacity=ResourceVector(cap))
        for sid, pos, radius, cap in servers
    )
    built_users = tuple(
        User(
            id=uid,
            position=pos,
            candidate_servers=candidate_servers(
                User(id=uid, position=pos), built_servers, DistanceMetric.PLANAR
            ),
        )
        for uid, pos in users
    )
    return Scenario(
        users=built_users,
        servers=built_servers,
        catalog=catalog,
        qoe_params=params,
        metric=DistanceMetric.PLANAR,
        seed=seed,
    )


def motivating_instance() -> Scenario:
    """Two users sharing one server with capacity (6, 9, 7, 8).

    The capacity admits both users at tier 2, or one at tier 3 plus one at
    tier 1, but not tier 3 plus tier 2 — the smallest instance where
    greedily maxing the first user's tier loses to balancing both.
    """
    return planar_scenario(
        users=[(7, (1.0, 0.0)), (8, (0.0, 1.0))],
        servers=[(4, (0.0, 0.0), 5.0, (6, 9, 7, 8))],
    )


def random_catalog(rng: np.random.Generator, d: int, q: int, params: QoEParams) -> QoSCatalog:
    """Strictly growing integer demand tiers (componentwise, one strict step)."""
    demands = []
    base = [int(rng.integers(1, 4)) for _ in range(d)]
    demands.append(tuple(base))
    for _ in range(q - 1):
        step = [int(rng.integers(0, 3)) for _ in range(d)]
        if not any(step):
            step[int(rng.integers(d))] = 1
        base = [b + s for b, s in zip(base, step)]
        demands.append(tuple(base))
    return QoSCatalog.from_demands(demands, params)


def random_scenario(
    rng: np.random.Generator,
    n_max: int = 6,
    m_max: int = 3,
    q_max: int = 3,
    n_min: int = 0,
    d: int | None = None,
    cap_max: int = 30,
    allow_default_catalog: bool = True,
    n: int | None = None,
    m: int | None = None,
) -> Scenario:
    """A random planar unit-square instance for fuzzing.

    Radii are drawn wide enough that overlap, multi-coverage and uncovered
    users all occur.  Capacities are integers, so feasibility stays exact.
    """
    if n is None:
        n = int(rng.integers(n_min, n_max + 1))
    if m is None:
        m = int(rng.integers(0, m_max + 1))
    params = QoEParams(
        max_value=float(rng.uniform(1.0, 10.0)),
        growth_rate=float(rng.uniform(0.5, 3.0)),
        midpoint=float(rng.uniform(0.0, 5.0)),
    )
    if allow_default_catalog and rng.random() < 0.5:
        d_ = 4
        catalog = QoSCatalog.from_demands(DEMO_LEVELS, params)
    else:
        d_ = d if d is not None else int(rng.integers(1, 5))
        q = int(rng.integers(1, q_max + 1))
        catalog = random_catalog(rng, d_, q, params)

    servers = [
        (
            j + 1,
            (float(rng.uniform(0, 1)), float(rng.uniform(0, 1))),
            float(rng.uniform(0.05, 0.7)),
            tuple(int(rng.integers(0, cap_max + 1)) for _ in range(catalog.dimensions)),
        )
        for j in range(m)
    ]
    users = [
        (i + 1, (float(rng.uniform(0, 1)), float(rng.uniform(0, 1))))
        for i in range(n)
    ]
    return planar_scenario(users, servers, catalog=catalog, params=params)


def contention_scenario(rng: np.random.Generator, n: int = 60, m: int = 6) -> Scenario:
    """Many users on few tight servers; forces real allocation decisions."""
    servers = [
        (
            j + 1,
            (float(rng.uniform(0, 1)), float(rng.uniform(0, 1))),
            float(rng.uniform(0.3, 0.9)),
            tuple(int(rng.integers(6, 16)) for _ in range(4)),
        )
        for j in range(m)
    ]
    users = [
        (i + 1, (float(rng.uniform(0, 1)), float(rng.uniform(0, 1))))
        for i in range(n)
    ]
    return planar_scenario(users, servers)

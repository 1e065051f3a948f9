"""Core domain model for QoE-aware edge user allocation.

An instance of the problem is a :class:`Scenario`: a set of users and a set
of edge servers with positions, coverage radii and multi-dimensional resource
capacities, plus a catalog of discrete service tiers (:class:`QoSCatalog`).
Allocating a user to a server at some tier consumes that tier's resource
demand on the server and earns the tier's satisfaction value (QoE); users
left on the cloud fallback earn zero.  This module holds the value types,
the logistic satisfaction curve, feasibility checking and allocation scoring.
All types are immutable after construction and safe to share across workers;
all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from .geometry import DistanceMetric

Number = int | float

#: Absolute slack used when comparing real-valued (non-integer) resource
#: quantities; integer quantities are always compared exactly.
REAL_TOLERANCE = 1e-9

#: Conventional names of the four resource axes used by the bundled
#: experiments.  The model itself works with any fixed dimension count.
DIMENSION_NAMES = ("cpu", "ram", "storage", "bandwidth")


def _is_int(x: Number) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _le_scalar(a: Number, b: Number) -> bool:
    """a <= b, exact on integers, with absolute slack on reals."""
    if _is_int(a) and _is_int(b):
        return a <= b
    return a <= b + REAL_TOLERANCE


@dataclass(frozen=True)
class ResourceVector:
    """A non-negative quantity of computing resources, one component per axis.

    Comparison is componentwise: ``a.dominated_by(b)`` holds iff every
    component of ``a`` is at most the matching component of ``b``.
    """

    components: tuple[Number, ...]

    def __init__(self, components: Iterable[Number]):
        comps = tuple(components)
        if not comps:
            raise ValueError("resource vector needs at least one component")
        for c in comps:
            if not isinstance(c, (int, float)) or isinstance(c, bool):
                raise ValueError(f"resource component {c!r} is not a number")
            if not math.isfinite(c):
                raise ValueError(f"resource component {c!r} is not finite")
            if c < 0:
                raise ValueError(f"resource component {c!r} is negative")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, k: int) -> Number:
        return self.components[k]

    def mean(self) -> float:
        return sum(self.components) / len(self.components)

    def dominated_by(self, other: "ResourceVector") -> bool:
        """Componentwise <= (exact on integers, tolerant on reals)."""
        self._check_dim(other)
        return all(_le_scalar(a, b) for a, b in zip(self.components, other.components))

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        self._check_dim(other)
        return ResourceVector(a + b for a, b in zip(self.components, other.components))

    def _check_dim(self, other: "ResourceVector") -> None:
        if len(self.components) != len(other.components):
            raise ValueError(
                f"dimension mismatch: {len(self.components)} vs {len(other.components)}"
            )

    @staticmethod
    def zeros(d: int) -> "ResourceVector":
        return ResourceVector((0,) * d)


@dataclass(frozen=True)
class QoEParams:
    """Parameters of the logistic satisfaction curve.

    ``max_value`` is the supremum of attainable QoE, ``growth_rate`` the
    steepness of the curve and ``midpoint`` the mean resource demand at
    which satisfaction reaches half of ``max_value``.
    """

    max_value: float
    growth_rate: float
    midpoint: float

    def __post_init__(self):
        if not (math.isfinite(self.max_value) and self.max_value > 0):
            raise ValueError("max_value must be a positive finite number")
        if not (math.isfinite(self.growth_rate) and self.growth_rate > 0):
            raise ValueError("growth_rate must be a positive finite number")
        if not math.isfinite(self.midpoint):
            raise ValueError("midpoint must be finite")


# Exponent clamp: below -36 the float64 sum 1 + e^t rounds to 1 (QoE would hit
# max_value exactly); above ~709 e^t overflows.  Clamping keeps the value
# inside the open interval (0, max_value) for every finite input.
_EXP_LO = -36.0
_EXP_HI = 700.0


def qoe_of_demand(demand: "ResourceVector | Sequence[Number]", params: QoEParams) -> float:
    """Satisfaction earned by a resource demand under the logistic curve.

    The demand vector is collapsed to the mean of its components ``x``; the
    returned value is ``max_value / (1 + exp(-growth_rate * (x - midpoint)))``,
    strictly increasing in ``x`` and confined to ``(0, max_value)``.
    Saturates numerically for means further than ~36/growth_rate from the
    midpoint.

    Raises ``ValueError`` on an empty vector or non-finite components.
    """
    comps = demand.components if isinstance(demand, ResourceVector) else tuple(demand)
    if not comps:
        raise ValueError("demand vector needs at least one component")
    for c in comps:
        if not math.isfinite(c):
            raise ValueError(f"demand component {c!r} is not finite")
    x = sum(comps) / len(comps)
    t = -params.growth_rate * (x - params.midpoint)
    t = min(_EXP_HI, max(_EXP_LO, t))
    return params.max_value / (1.0 + math.exp(t))


@dataclass(frozen=True)
class QoSLevel:
    """One assignable service tier: a resource demand plus its QoE value.

    ``index`` is the 1-based position of the tier in its catalog; ``qoe`` is
    precomputed once per catalog from the scenario's :class:`QoEParams`.
    """

    index: int
    demand: ResourceVector
    qoe: float

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("level index is 1-based")
        if not (math.isfinite(self.qoe) and self.qoe > 0):
            raise ValueError("level qoe must be positive and finite")


@dataclass(frozen=True)
class QoSCatalog:
    """Ordered service tiers with strictly growing demands and QoE values.

    Each step up the catalog needs at least as much of every resource and
    strictly more of at least one, so a downgrade always frees resources in
    every dimension.
    """

    levels: tuple[QoSLevel, ...]

    def __post_init__(self):
        if not self.levels:
            raise ValueError("catalog must not be empty")
        d = len(self.levels[0].demand)
        for pos, lvl in enumerate(self.levels, start=1):
            if lvl.index != pos:
                raise ValueError(f"catalog levels out of order at position {pos}")
            if len(lvl.demand) != d:
                raise ValueError("catalog levels disagree on dimension count")
        for lo, hi in zip(self.levels, self.levels[1:]):
            if not lo.demand.dominated_by(hi.demand):
                raise ValueError(
                    f"level {hi.index} must need at least as much of every "
                    f"resource as level {lo.index}"
                )
            if lo.demand.components == hi.demand.components:
                raise ValueError(f"levels {lo.index} and {hi.index} have equal demands")
            if not hi.qoe > lo.qoe:
                raise ValueError(f"qoe must strictly increase from level {lo.index}")

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def dimensions(self) -> int:
        return len(self.levels[0].demand)

    def level(self, index: int) -> QoSLevel:
        """Tier by 1-based index."""
        if not 1 <= index <= len(self.levels):
            raise ValueError(f"level index {index} outside 1..{len(self.levels)}")
        return self.levels[index - 1]

    @staticmethod
    def from_demands(
        demands: Iterable[Iterable[Number]], params: QoEParams
    ) -> "QoSCatalog":
        """Build a catalog, precomputing each tier's QoE from ``params``."""
        levels = []
        for i, dem in enumerate(demands, start=1):
            vec = dem if isinstance(dem, ResourceVector) else ResourceVector(dem)
            levels.append(QoSLevel(index=i, demand=vec, qoe=qoe_of_demand(vec, params)))
        return QoSCatalog(tuple(levels))


@dataclass(frozen=True)
class User:
    """An app user: a position and the derived set of servers covering it."""

    id: int
    position: tuple[float, float]
    candidate_servers: frozenset[int] = frozenset()

    def __post_init__(self):
        if len(self.position) != 2 or not all(math.isfinite(c) for c in self.position):
            raise ValueError(f"user {self.id}: position must be a finite coordinate pair")
        if not isinstance(self.candidate_servers, frozenset):
            object.__setattr__(self, "candidate_servers", frozenset(self.candidate_servers))


@dataclass(frozen=True)
class EdgeServer:
    """An edge server: position, coverage radius and resource capacity."""

    id: int
    position: tuple[float, float]
    radius: float
    capacity: ResourceVector

    def __post_init__(self):
        if len(self.position) != 2 or not all(math.isfinite(c) for c in self.position):
            raise ValueError(f"server {self.id}: position must be a finite coordinate pair")
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"server {self.id}: radius must be non-negative")


@dataclass(frozen=True)
class Scenario:
    """One full problem instance.

    ``users`` keep their stated order — heuristic solvers process them in
    it.  Candidate server sets are expected to be consistent with the
    coverage geometry; ``edgealloc.scenario.validate_geometry`` re-derives
    and checks them.
    """

    users: tuple[User, ...]
    servers: tuple[EdgeServer, ...]
    catalog: QoSCatalog
    qoe_params: QoEParams
    metric: "DistanceMetric"
    seed: int = 0

    def __post_init__(self):
        if len({u.id for u in self.users}) != len(self.users):
            raise ValueError("duplicate user ids")
        if len({s.id for s in self.servers}) != len(self.servers):
            raise ValueError("duplicate server ids")
        server_ids = {s.id for s in self.servers}
        d = self.catalog.dimensions
        for s in self.servers:
            if len(s.capacity) != d:
                raise ValueError(
                    f"server {s.id}: capacity has {len(s.capacity)} dimensions, "
                    f"catalog has {d}"
                )
        for u in self.users:
            if not u.candidate_servers <= server_ids:
                raise ValueError(f"user {u.id}: candidate servers not in scenario")
        for lvl in self.catalog.levels:
            expect = qoe_of_demand(lvl.demand, self.qoe_params)
            if abs(lvl.qoe - expect) > REAL_TOLERANCE:
                raise ValueError(
                    f"catalog level {lvl.index}: stored qoe {lvl.qoe!r} does not "
                    f"match the scenario's QoE parameters"
                )

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_servers(self) -> int:
        return len(self.servers)

    def user_by_id(self, uid: int) -> User:
        for u in self.users:
            if u.id == uid:
                return u
        raise ValueError(f"unknown user id {uid}")

    def server_by_id(self, sid: int) -> EdgeServer:
        for s in self.servers:
            if s.id == sid:
                return s
        raise ValueError(f"unknown server id {sid}")


@dataclass(frozen=True)
class Allocation:
    """Per-user outcome: ``None`` for the cloud fallback, else
    ``(server_id, level_index)`` with a 1-based level index.

    The mapping representation makes double assignment impossible by
    construction: a user holds at most one (server, level) pair.  Treat the
    mapping as read-only.
    """

    assignment: Mapping[int, tuple[int, int] | None]

    def get(self, uid: int) -> tuple[int, int] | None:
        if uid not in self.assignment:
            raise ValueError(f"unknown user id {uid}")
        return self.assignment[uid]

    @property
    def allocated_count(self) -> int:
        return sum(1 for a in self.assignment.values() if a is not None)

    @property
    def user_ids(self) -> frozenset[int]:
        return frozenset(self.assignment)

    @staticmethod
    def empty(scenario: Scenario) -> "Allocation":
        return Allocation({u.id: None for u in scenario.users})


def qoe_of_user(allocation: Allocation, uid: int, catalog: QoSCatalog) -> float:
    """QoE earned by one user: the assigned tier's value, or 0 on the cloud."""
    assigned = allocation.get(uid)
    if assigned is None:
        return 0.0
    _, level = assigned
    return catalog.level(level).qoe


def score(allocation: Allocation, scenario: Scenario) -> float:
    """Total QoE of an allocation, summed in user-id order.

    The fixed summation order makes the result bit-reproducible.  Raises
    ``ValueError`` when the allocation does not cover exactly the scenario's
    users.
    """
    _check_same_users(allocation, scenario)
    return float(
        sum(
            qoe_of_user(allocation, uid, scenario.catalog)
            for uid in sorted(allocation.assignment)
        )
    )


@dataclass(frozen=True)
class Violation:
    """One violated allocation constraint.

    ``kind`` is ``"proximity"`` (user assigned to a server that does not
    cover it) or ``"capacity"`` (a server's summed demands exceed capacity
    in one dimension).
    """

    kind: str
    server_id: int
    user_id: int | None = None
    dimension: int | None = None
    load: Number | None = None
    capacity: Number | None = None

    def __str__(self) -> str:
        if self.kind == "proximity":
            return (
                f"proximity: user {self.user_id} assigned to server "
                f"{self.server_id} outside its coverage"
            )
        name = (
            DIMENSION_NAMES[self.dimension]
            if self.dimension is not None and self.dimension < len(DIMENSION_NAMES)
            else f"dim{self.dimension}"
        )
        return (
            f"capacity: server {self.server_id} {name} load {self.load} "
            f"exceeds capacity {self.capacity}"
        )


def check_feasible(allocation: Allocation, scenario: Scenario) -> list[Violation]:
    """All constraints violated by an allocation; an empty list means feasible.

    Checks coverage (each user only on a server that covers it) and capacity
    (per server, per dimension, the summed tier demands at most the server's
    capacity — exactly for integer quantities, within ``REAL_TOLERANCE`` for
    reals).  One-server-one-level holds by construction of
    :class:`Allocation`.  Structural defects — wrong user set, unknown server
    id, level index outside the catalog — raise ``ValueError`` instead of
    being reported as violations.
    """
    _check_same_users(allocation, scenario)
    servers = {s.id: s for s in scenario.servers}
    users = {u.id: u for u in scenario.users}
    d = scenario.catalog.dimensions
    q = len(scenario.catalog)

    violations: list[Violation] = []
    loads: dict[int, list[Number]] = {sid: [0] * d for sid in servers}
    for uid in sorted(allocation.assignment):
        assigned = allocation.assignment[uid]
        if assigned is None:
            continue
        sid, level = assigned
        if sid not in servers:
            raise ValueError(f"user {uid} assigned to unknown server {sid}")
        if not 1 <= level <= q:
            raise ValueError(f"user {uid} assigned level {level} outside 1..{q}")
        if sid not in users[uid].candidate_servers:
            violations.append(Violation(kind="proximity", server_id=sid, user_id=uid))
        demand = scenario.catalog.level(level).demand
        load = loads[sid]
        for k in range(d):
            load[k] += demand[k]

    for sid in sorted(loads):
        cap = servers[sid].capacity
        for k in range(d):
            if not _le_scalar(loads[sid][k], cap[k]):
                violations.append(
                    Violation(
                        kind="capacity",
                        server_id=sid,
                        dimension=k,
                        load=loads[sid][k],
                        capacity=cap[k],
                    )
                )
    return violations


def _check_same_users(allocation: Allocation, scenario: Scenario) -> None:
    have = set(allocation.assignment)
    want = {u.id for u in scenario.users}
    if have != want:
        missing = sorted(want - have)
        extra = sorted(have - want)
        raise ValueError(
            f"allocation does not cover the scenario's users "
            f"(missing {missing}, extra {extra})"
        )


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one solver invocation.

    ``optimal`` means proven optimal.  ``nodes_explored`` counts search nodes
    (0 for non-search methods); ``rng`` names the random stream consumed by
    stochastic methods so results replicate across platforms.
    """

    solver: str
    allocation: Allocation
    total_qoe: float
    allocated_count: int
    wall_time_s: float
    optimal: bool
    nodes_explored: int = 0
    rng: str | None = None


def make_report(
    solver: str,
    allocation: Allocation,
    scenario: Scenario,
    wall_time_s: float,
    optimal: bool,
    nodes_explored: int = 0,
    rng: str | None = None,
) -> SolverReport:
    """Assemble a report, deriving the total QoE and allocated count."""
    return SolverReport(
        solver=solver,
        allocation=allocation,
        total_qoe=score(allocation, scenario),
        allocated_count=allocation.allocated_count,
        wall_time_s=wall_time_s,
        optimal=optimal,
        nodes_explored=nodes_explored,
        rng=rng,
    )


def default_qoe_params() -> QoEParams:
    """QoE curve used by the bundled experiments (max 5, rate 1.5, midpoint 2)."""
    return QoEParams(max_value=5.0, growth_rate=1.5, midpoint=2.0)


def default_catalog(params: QoEParams | None = None) -> QoSCatalog:
    """Three-tier catalog used by the bundled experiments."""
    return QoSCatalog.from_demands(
        [(1, 2, 1, 2), (2, 3, 3, 4), (5, 7, 6, 6)],
        params or default_qoe_params(),
    )

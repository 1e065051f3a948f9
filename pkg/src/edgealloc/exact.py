"""Exact solver: best-first branch and bound over per-user choices.

Each search node fixes a prefix of users to a choice — cloud fallback or
(server, tier) — and carries the servers' remaining capacities.  Nodes are
expanded in order of an optimistic upper bound on the total QoE attainable
below them:

* every unfixed user covered by more than one server is granted the best
  tier that still fits any of its candidate servers individually (capacity
  coupling across servers ignored), while users covered by exactly one
  server compete for it and are bounded by the LP relaxation of that
  server's multiple-choice knapsack, solved greedily on the
  QoE-per-mean-resource ratio over the tiers that still fit;
* independently, all unfixed users compete fractionally for the pooled
  remaining capacity of every server, once per resource dimension and once
  on the dimension mean — valid because per-server constraints sum to the
  pooled one on every axis.

The node bound is the smallest of these; all of them only ever overestimate
what a feasible completion can earn, so an incumbent at least as good as a
node's bound proves the node away.  Each expanded node is also completed
greedily (a "plunge") to keep a feasible incumbent available from the first
expansion on; without one, a bound plateau would starve the search of
leaves.

Users sharing a candidate set are interchangeable, so among them only the
canonical non-increasing choice sequence is explored; every feasible
multiset of choices survives as exactly one canonical arrangement.

Because catalog demands grow componentwise, the tiers fitting a given
remaining capacity always form a prefix of the catalog, which keeps the
per-node work small.  The search is deterministic: heap ties prefer deeper
nodes and then insertion order, children are generated server-id then tier
ascending.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .model import Allocation, Scenario, SolverReport, make_report

#: Refuse instances with more decision variables (users * servers * tiers).
DECISION_VARIABLE_LIMIT = 10**7

# incumbent updates and prune decisions use this absolute slack; it is far
# below the 1e-9 equality tolerance the solver is held to
_EPS = 1e-12


@dataclass(frozen=True)
class ExactSolverConfig:
    """Search limits. Zero means unlimited.

    ``gap_tolerance`` stops the search once the best open bound is within
    that much of the incumbent (the result is then only optimal when the
    gap actually closed).  ``validate_bounds`` asserts, at every feasible
    completion, that no ancestor's bound was below the value found beneath
    it — a soundness self-check for tests and debugging.
    """

    time_limit_s: float = 0.0
    gap_tolerance: float = 0.0
    node_limit: int = 0
    validate_bounds: bool = False

    def __post_init__(self):
        if self.gap_tolerance < 0:
            raise ValueError("gap_tolerance must be >= 0")
        if self.time_limit_s < 0:
            raise ValueError("time_limit_s must be >= 0")
        if self.node_limit < 0:
            raise ValueError("node_limit must be >= 0")


def solve_exact(sc: Scenario, config: ExactSolverConfig | None = None) -> SolverReport:
    """Provably optimal allocation, or the best incumbent when a limit hits.

    The returned allocation is always feasible (the cloud-only allocation is
    the starting incumbent).  ``report.optimal`` is True only when the search
    proved no better allocation exists.  Deterministic for a fixed scenario.
    """
    cfg = config or ExactSolverConfig()
    t0 = time.perf_counter()

    n, m, q = sc.n_users, sc.n_servers, len(sc.catalog)
    if n * m * q > DECISION_VARIABLE_LIMIT:
        raise ValueError(
            f"instance too large: {n * m * q} decision variables "
            f"> {DECISION_VARIABLE_LIMIT}"
        )

    search = _Search(sc, cfg)
    search.run(t0)

    assignment = {u.id: None for u in sc.users}
    assignment.update(search.best_assignment())
    return make_report(
        "exact",
        Allocation(assignment),
        sc,
        time.perf_counter() - t0,
        optimal=search.proven,
        nodes_explored=search.nodes,
    )


class _Search:
    def __init__(self, sc: Scenario, cfg: ExactSolverConfig):
        self.cfg = cfg
        self.q = len(sc.catalog)
        self.demands = [lvl.demand.components for lvl in sc.catalog.levels]
        self.qoes = [lvl.qoe for lvl in sc.catalog.levels]
        self.means = [lvl.demand.mean() for lvl in sc.catalog.levels]
        self.d = sc.catalog.dimensions
        # integer instances compare capacities exactly; any real quantity
        # gets the model's absolute tolerance
        all_int = all(
            isinstance(x, int)
            for s in sc.servers
            for x in s.capacity.components
        ) and all(isinstance(x, int) for dem in self.demands for x in dem)
        self.tol = 0.0 if all_int else 1e-9

        self.server_ids = [s.id for s in sc.servers]
        server_index = {sid: j for j, sid in enumerate(self.server_ids)}
        self.initial = tuple(s.capacity.components for s in sc.servers)

        # branch on the most constrained users first; grouping equal
        # candidate sets keeps interchangeable users adjacent for the
        # symmetry rule, and ids break the remaining ties
        decorated = sorted(
            (
                len(u.candidate_servers),
                tuple(sorted(server_index[sid] for sid in u.candidate_servers)),
                u.id,
            )
            for u in sc.users
        )
        self.user_ids = [uid for _, _, uid in decorated]
        self.cands = [cand for _, cand, _ in decorated]
        self.n = len(decorated)

        # tiers fitting a capacity are always a catalog prefix, so every
        # possible knapsack frontier can be precomputed per prefix length,
        # per scalarization axis (the mean plus each single dimension)
        axes = [self.means] + [
            [dem[k] for dem in self.demands] for k in range(self.d)
        ]
        self.axis_items = [
            [
                [
                    (dq / dm if dm > 0 else float("inf"), dm, dq)
                    for dm, dq in self._frontier(top, axis)
                ]
                for top in range(self.q + 1)
            ]
            for axis in axes
        ]
        self.frontier_items = self.axis_items[0]

        self.best_value = 0.0
        self.best_choices: tuple = tuple([None] * self.n)
        self.proven = False
        self.nodes = 0

    # -- primitives ---------------------------------------------------------

    def _best_fitting(self, remaining_j: tuple) -> int:
        """Highest tier index fitting ``remaining_j``, or -1; scans top down."""
        tol = self.tol
        for l in range(self.q - 1, -1, -1):
            demand = self.demands[l]
            for a, b in zip(demand, remaining_j):
                if a > b + tol:
                    break
            else:
                return l
        return -1

    def _frontier(self, top: int, axis: list[float]) -> list[tuple[float, float]]:
        """LP-efficient (demand delta, qoe delta) steps over tiers 0..top-1.

        ``axis[l]`` scalarizes tier l's demand (its mean, or one dimension).
        Steps come out with non-increasing qoe/demand ratios, so a greedy
        fractional fill over them solves the per-user chain relaxation.
        """
        best_at: dict[float, float] = {}
        for l in range(top):
            x = axis[l]
            if x not in best_at or self.qoes[l] > best_at[x]:
                best_at[x] = self.qoes[l]
        pts = sorted(best_at.items())
        hull: list[tuple[float, float]] = [(0.0, 0.0)]
        for x, qoe in pts:
            if qoe <= hull[-1][1]:
                continue
            while len(hull) >= 2:
                m1, q1 = hull[-2]
                m2, q2 = hull[-1]
                # drop the middle point when it lies under the chord
                if (q2 - q1) * (x - m1) <= (qoe - q1) * (m2 - m1):
                    hull.pop()
                else:
                    break
            hull.append((x, qoe))
        return [
            (hull[i][0] - hull[i - 1][0], hull[i][1] - hull[i - 1][1])
            for i in range(1, len(hull))
        ]

    # -- bounding -----------------------------------------------------------

    def _bound(self, depth: int, remaining: tuple) -> float:
        """Optimistic value of the best completion below a node."""
        m = len(remaining)
        best_l = [-1] * m
        for j in range(m):
            best_l[j] = self._best_fitting(remaining[j])

        loose = 0.0
        exclusive = [0] * m
        by_prefix = [0] * self.q  # users per highest reachable tier
        for i in range(depth, self.n):
            cand = self.cands[i]
            if not cand:
                continue
            if len(cand) == 1:
                b = best_l[cand[0]]
                if b >= 0:
                    by_prefix[b] += 1
                    exclusive[cand[0]] += 1
            else:
                b = -1
                for j in cand:
                    if best_l[j] > b:
                        b = best_l[j]
                if b >= 0:
                    by_prefix[b] += 1
                    loose += self.qoes[b]

        for j in range(m):
            k = exclusive[j]
            if not k or best_l[j] < 0:
                continue
            loose += self._fill(
                [(r, dm, dq, k) for r, dm, dq in self.frontier_items[best_l[j] + 1]],
                sum(remaining[j]) / self.d,
            )

        bound = loose
        # pooled relaxations: the mean axis, then each dimension on its own
        for axis, items_by_top in enumerate(self.axis_items):
            if axis == 0:
                pool = sum(sum(rem) for rem in remaining) / self.d
            else:
                k = axis - 1
                pool = sum(rem[k] for rem in remaining)
            items = [
                (r, dm, dq, count)
                for b, count in enumerate(by_prefix)
                if count
                for r, dm, dq in items_by_top[b + 1]
            ]
            items.sort(key=lambda it: -it[0])
            pooled = self._fill(items, pool, presorted=True)
            if pooled < bound:
                bound = pooled
        return bound

    @staticmethod
    def _fill(items: list[tuple], capacity: float, presorted: bool = False) -> float:
        """Greedy fractional fill of ratio-ordered (ratio, dm, dq, count) items."""
        if not presorted:
            items.sort(key=lambda it: -it[0])
        total = 0.0
        for _, dm, dq, count in items:
            if dm <= 0.0:
                total += count * dq
                continue
            take = min(count * dm, capacity)
            if take <= 0.0:
                break
            total += dq * (take / dm)
            capacity -= take
            if capacity <= 0.0:
                break
        return total

    # -- primal plunge ------------------------------------------------------

    def _plunge(self, depth: int, fixed: float, remaining: tuple, choices: tuple):
        """Greedy feasible completion; updates the incumbent when it wins.

        Walks the unfixed users in branch order, granting each the highest
        tier fitting any of its candidate servers (ties to the lowest server
        index) and consuming capacity as it goes.
        """
        rem = [list(r) for r in remaining]
        tol = self.tol
        value = fixed
        tail: list[tuple[int, int] | None] = []
        for i in range(depth, self.n):
            pick_j = -1
            pick_l = -1
            for j in self.cands[i]:
                rem_j = rem[j]
                for l in range(self.q - 1, pick_l, -1):
                    demand = self.demands[l]
                    for a, b in zip(demand, rem_j):
                        if a > b + tol:
                            break
                    else:
                        pick_j, pick_l = j, l
                        break
            if pick_l < 0:
                tail.append(None)
                continue
            demand = self.demands[pick_l]
            rem_j = rem[pick_j]
            for k, a in enumerate(demand):
                rem_j[k] -= a
            value += self.qoes[pick_l]
            tail.append((pick_j, pick_l + 1))
        if value > self.best_value + _EPS:
            self.best_value = value
            self.best_choices = choices + tuple(tail)
        return value

    # -- search -------------------------------------------------------------

    def run(self, t0: float) -> None:
        if self.n == 0:
            self.proven = True
            return
        root_remaining = self.initial
        root_bound = self._bound(0, root_remaining)
        plunged = self._plunge(0, 0.0, root_remaining, ())
        if self.cfg.validate_bounds:
            assert plunged <= root_bound + 1e-9
        if root_bound <= self.best_value + _EPS:
            self.proven = True
            return

        seq = 0
        # entries: (-bound, -depth, insertion seq, fixed value, remaining, choices)
        heap = [(-root_bound, 0, seq, 0.0, root_remaining, ())]
        limit_hit = False

        while heap:
            if self.cfg.node_limit and self.nodes >= self.cfg.node_limit:
                limit_hit = True
                break
            if self.cfg.time_limit_s and time.perf_counter() - t0 > self.cfg.time_limit_s:
                limit_hit = True
                break

            neg_bound, neg_depth, _, fixed, remaining, choices = heapq.heappop(heap)
            bound, depth = -neg_bound, -neg_depth
            if bound <= self.best_value + _EPS:
                # best-first: every open node is at most this bound
                self.proven = True
                return
            if self.cfg.gap_tolerance and bound <= self.best_value + self.cfg.gap_tolerance:
                self.proven = bound <= self.best_value + _EPS
                return

            self.nodes += 1
            plunged = self._plunge(depth, fixed, remaining, choices)
            if self.cfg.validate_bounds:
                assert plunged <= bound + 1e-9, (
                    f"bound {bound} below plunge value {plunged}"
                )
            if bound <= self.best_value + _EPS:
                # the plunge matched everything this subtree could offer, and
                # best-first order caps every other open node at this bound
                self.proven = True
                return

            prev_choice = choices[-1] if choices else None
            last = depth + 1 == self.n
            for choice, gain, child_remaining in self._children(depth, remaining, prev_choice):
                child_fixed = fixed + gain
                child_choices = choices + (choice,)
                if last:
                    if self.cfg.validate_bounds:
                        assert child_fixed <= bound + 1e-9, (
                            f"bound {bound} below completed value {child_fixed}"
                        )
                    if child_fixed > self.best_value + _EPS:
                        self.best_value = child_fixed
                        self.best_choices = child_choices
                    continue
                child_bound = child_fixed + self._bound(depth + 1, child_remaining)
                # keep the chain monotone so every ancestor bound is valid
                child_bound = min(child_bound, bound)
                if child_bound <= self.best_value + _EPS:
                    continue
                seq += 1
                heapq.heappush(
                    heap,
                    (-child_bound, -(depth + 1), seq, child_fixed, child_remaining, child_choices),
                )

        if not limit_hit:
            self.proven = True

    def _children(self, depth: int, remaining: tuple, prev_choice):
        """Choices for the next user: cloud first, then feasible placements.

        When this user's candidate set equals the previous user's, the two
        are interchangeable and only choices not exceeding the previous
        user's (cloud lowest, then server index and tier ascending) are
        generated — the canonical arrangement of an unordered choice pair.
        """
        yield None, 0.0, remaining
        cap = None
        if depth > 0 and self.cands[depth] == self.cands[depth - 1]:
            if prev_choice is None:
                return
            cap = prev_choice
        tol = self.tol
        for j in self.cands[depth]:
            if cap is not None and j > cap[0]:
                break
            rem_j = remaining[j]
            top = self.q
            if cap is not None and j == cap[0]:
                top = cap[1]
            for l in range(top):
                demand = self.demands[l]
                fits = True
                for a, b in zip(demand, rem_j):
                    if a > b + tol:
                        fits = False
                        break
                if not fits:
                    # higher tiers need at least as much of everything
                    break
                new_rem_j = tuple(r - d for r, d in zip(rem_j, demand))
                child = remaining[:j] + (new_rem_j,) + remaining[j + 1 :]
                yield (j, l + 1), self.qoes[l], child

    def best_assignment(self) -> dict[int, tuple[int, int] | None]:
        out: dict[int, tuple[int, int] | None] = {}
        for uid, choice in zip(self.user_ids, self.best_choices):
            if choice is None:
                out[uid] = None
            else:
                j, level = choice
                out[uid] = (self.server_ids[j], level)
        return out

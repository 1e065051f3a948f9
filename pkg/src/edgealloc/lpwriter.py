"""Export an instance as a CPLEX-style LP text file for external cross-checks.

One binary per (user, server, tier) triple.  The objective sums each tier's
QoE over the chosen binaries; a row per (server, dimension) caps the summed
demands; a row per user enforces at-most-one choice; binaries for pairs
outside coverage are pinned to zero in the Bounds section.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .exact import DECISION_VARIABLE_LIMIT
from .model import DIMENSION_NAMES, Scenario

_TERMS_PER_LINE = 6


def _var(uid: int, sid: int, level: int) -> str:
    return f"x_u{uid}_s{sid}_l{level}"


def _wrap(terms: Iterable[str]) -> str:
    terms = list(terms)
    lines = []
    for i in range(0, len(terms), _TERMS_PER_LINE):
        lines.append(" ".join(terms[i : i + _TERMS_PER_LINE]))
    return "\n   ".join(lines)


def _dim_name(k: int, d: int) -> str:
    if d == len(DIMENSION_NAMES):
        return DIMENSION_NAMES[k]
    return f"r{k + 1}"


def build_lp(sc: Scenario) -> str:
    """Render the instance as LP text; see module docstring for the layout."""
    n, m, q = sc.n_users, sc.n_servers, len(sc.catalog)
    if n * m * q > DECISION_VARIABLE_LIMIT:
        raise ValueError(
            f"instance too large to export: {n * m * q} decision variables "
            f"> {DECISION_VARIABLE_LIMIT}"
        )
    d = sc.catalog.dimensions
    qoes = [lvl.qoe for lvl in sc.catalog.levels]
    demands = [lvl.demand.components for lvl in sc.catalog.levels]

    obj_terms = []
    for u in sc.users:
        for sid in sorted(u.candidate_servers):
            for l in range(1, q + 1):
                obj_terms.append(f"+ {qoes[l - 1]!r} {_var(u.id, sid, l)}")

    rows = []
    for s in sc.servers:
        covered = [u for u in sc.users if s.id in u.candidate_servers]
        for k in range(d):
            terms = [
                f"+ {demands[l - 1][k]} {_var(u.id, s.id, l)}"
                for u in covered
                for l in range(1, q + 1)
                if demands[l - 1][k] != 0
            ]
            if terms:
                rows.append(
                    f" cap_s{s.id}_{_dim_name(k, d)}: {_wrap(terms)} <= {s.capacity[k]}"
                )
    for u in sc.users:
        terms = [
            f"+ {_var(u.id, sid, l)}"
            for sid in sorted(u.candidate_servers)
            for l in range(1, q + 1)
        ]
        if terms:
            rows.append(f" one_u{u.id}: {_wrap(terms)} <= 1")

    fixed_zero = []
    binaries = []
    for u in sc.users:
        for s in sc.servers:
            outside = s.id not in u.candidate_servers
            for l in range(1, q + 1):
                name = _var(u.id, s.id, l)
                binaries.append(name)
                if outside:
                    fixed_zero.append(f" {name} = 0")

    parts = [
        "\\ edge user allocation: maximize total QoE",
        "\\ binaries pinned to 0 in Bounds are user-server pairs outside coverage",
        "Maximize",
        f" obj: {_wrap(obj_terms)}" if obj_terms else " obj:",
        "Subject To",
    ]
    parts.extend(rows)
    if fixed_zero:
        parts.append("Bounds")
        parts.extend(fixed_zero)
    if binaries:
        parts.append("Binary")
        parts.append(" " + _wrap(binaries))
    parts.append("End")
    return "\n".join(parts) + "\n"


def write_lp(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(build_lp(sc), encoding="utf-8")

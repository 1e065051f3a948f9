"""Dataset ingestion, scenario sampling and scenario file round-tripping.

Datasets are two CSVs — base stations (``id,lat,lon,radius_m``) and end
users (``id,lat,lon``) — in geographic coordinates.  A
:class:`GenerationSpec` samples a scenario from a dataset: pick user
positions uniformly without replacement, keep the servers covering at least
one of them, retain a fraction of those, and draw each retained server's
per-dimension capacity from a normal distribution rounded to a non-negative
integer.  Everything is driven by one seed, so a (dataset, spec) pair fully
determines the scenario.

Scenario files are single JSON documents that round-trip losslessly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import DistanceMetric, candidate_servers, distance
from .model import (
    EdgeServer,
    QoEParams,
    QoSCatalog,
    ResourceVector,
    Scenario,
    User,
    default_catalog,
    default_qoe_params,
)


@dataclass(frozen=True)
class Station:
    id: int
    lat: float
    lon: float
    radius_m: float


@dataclass(frozen=True)
class EndUser:
    id: int
    lat: float
    lon: float


@dataclass(frozen=True)
class Dataset:
    """Validated base stations and end-user positions."""

    stations: tuple[Station, ...]
    end_users: tuple[EndUser, ...]


def load_dataset(stations_path: str | Path, users_path: str | Path) -> Dataset:
    """Read and validate the two dataset CSVs.

    Raises ``ValueError`` naming the file and line for a malformed row,
    duplicate id or out-of-range coordinate; an empty stations (users) file
    is reported as "no stations" ("no users").
    """
    stations = []
    for line_no, row in _read_rows(stations_path, ("id", "lat", "lon", "radius_m")):
        sid = _parse_int(row["id"], stations_path, line_no, "id")
        lat = _parse_float(row["lat"], stations_path, line_no, "lat")
        lon = _parse_float(row["lon"], stations_path, line_no, "lon")
        radius = _parse_float(row["radius_m"], stations_path, line_no, "radius_m")
        _check_geo(lat, lon, stations_path, line_no)
        if radius < 0:
            raise ValueError(f"{stations_path}:{line_no}: negative radius {radius}")
        stations.append(Station(sid, lat, lon, radius))
    if not stations:
        raise ValueError(f"{stations_path}: no stations")
    _check_unique([s.id for s in stations], stations_path)

    users = []
    for line_no, row in _read_rows(users_path, ("id", "lat", "lon")):
        uid = _parse_int(row["id"], users_path, line_no, "id")
        lat = _parse_float(row["lat"], users_path, line_no, "lat")
        lon = _parse_float(row["lon"], users_path, line_no, "lon")
        _check_geo(lat, lon, users_path, line_no)
        users.append(EndUser(uid, lat, lon))
    if not users:
        raise ValueError(f"{users_path}: no users")
    _check_unique([u.id for u in users], users_path)

    return Dataset(tuple(stations), tuple(users))


def _read_rows(path: str | Path, columns: tuple[str, ...]):
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return
        if [h.strip() for h in header] != list(columns):
            raise ValueError(
                f"{path}:1: expected header {','.join(columns)!r}, got {','.join(header)!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(columns):
                raise ValueError(
                    f"{path}:{line_no}: expected {len(columns)} fields, got {len(row)}"
                )
            yield line_no, dict(zip(columns, row))


def _parse_int(text: str, path, line_no: int, col: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{path}:{line_no}: {col} {text!r} is not an integer") from None


def _parse_float(text: str, path, line_no: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{path}:{line_no}: {col} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ValueError(f"{path}:{line_no}: {col} {text!r} is not finite")
    return value


def _check_geo(lat: float, lon: float, path, line_no: int) -> None:
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"{path}:{line_no}: latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"{path}:{line_no}: longitude {lon} outside [-180, 180]")


def _check_unique(ids: list[int], path) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise ValueError(f"{path}: duplicate id {i}")
        seen.add(i)


@dataclass(frozen=True)
class GenerationSpec:
    """How to sample one scenario from a dataset.

    ``server_fraction`` of the servers covering at least one sampled user is
    retained (rounded to nearest, never below one server).  Capacities are
    drawn per dimension from N(capacity_mean, capacity_stddev^2), rounded to
    the nearest integer and clamped at zero, so feasibility checks stay
    exact.
    """

    n_users: int
    server_fraction: float = 0.7
    capacity_mean: float = 35.0
    capacity_stddev: float = 1.0
    catalog: QoSCatalog = field(default_factory=default_catalog)
    qoe_params: QoEParams = field(default_factory=default_qoe_params)
    seed: int = 0
    metric: DistanceMetric = DistanceMetric.GREAT_CIRCLE

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if not 0.0 < self.server_fraction <= 1.0:
            raise ValueError("server_fraction must be in (0, 1]")
        if self.capacity_mean <= 0:
            raise ValueError("capacity_mean must be > 0")
        if self.capacity_stddev < 0:
            raise ValueError("capacity_stddev must be >= 0")


def generate_scenario(dataset: Dataset, spec: GenerationSpec) -> Scenario:
    """Sample one scenario; the same (dataset, spec) always yields the same one.

    Draw order, all from one PCG64 stream seeded with ``spec.seed``: user
    positions (without replacement, kept in draw order, which randomizes the
    solver input order), the retained subset of covering servers, then each
    retained server's capacities in dataset order.
    """
    if spec.n_users > len(dataset.end_users):
        raise ValueError(
            f"dataset has {len(dataset.end_users)} users, need {spec.n_users}"
        )
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    picked = rng.choice(len(dataset.end_users), size=spec.n_users, replace=False)
    sampled = [dataset.end_users[i] for i in picked]

    covering = [
        st
        for st in dataset.stations
        if any(
            distance((eu.lat, eu.lon), (st.lat, st.lon), spec.metric) <= st.radius_m
            for eu in sampled
        )
    ]
    servers: list[EdgeServer] = []
    if covering:
        keep = max(1, int(math.floor(len(covering) * spec.server_fraction + 0.5)))
        kept_idx = sorted(rng.choice(len(covering), size=keep, replace=False))
        d = spec.catalog.dimensions
        for i in kept_idx:
            st = covering[i]
            draws = rng.normal(spec.capacity_mean, spec.capacity_stddev, size=d)
            capacity = ResourceVector(
                max(0, int(math.floor(x + 0.5))) for x in draws
            )
            servers.append(
                EdgeServer(
                    id=st.id,
                    position=(st.lat, st.lon),
                    radius=st.radius_m,
                    capacity=capacity,
                )
            )

    users = [
        User(
            id=eu.id,
            position=(eu.lat, eu.lon),
            candidate_servers=candidate_servers(
                User(id=eu.id, position=(eu.lat, eu.lon)), servers, spec.metric
            ),
        )
        for eu in sampled
    ]
    return Scenario(
        users=tuple(users),
        servers=tuple(servers),
        catalog=spec.catalog,
        qoe_params=spec.qoe_params,
        metric=spec.metric,
        seed=spec.seed,
    )


def validate_geometry(sc: Scenario) -> None:
    """Re-derive every candidate set from positions and radii and compare."""
    for u in sc.users:
        derived = candidate_servers(u, sc.servers, sc.metric)
        if derived != u.candidate_servers:
            raise ValueError(
                f"user {u.id}: stored candidate servers "
                f"{sorted(u.candidate_servers)} disagree with geometry "
                f"{sorted(derived)}"
            )


# -- scenario files ---------------------------------------------------------

SCENARIO_FORMAT = "edgealloc-scenario"
SCENARIO_VERSION = 1


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "format": SCENARIO_FORMAT,
        "version": SCENARIO_VERSION,
        "metric": sc.metric.value,
        "seed": sc.seed,
        "qoe": {
            "max_value": sc.qoe_params.max_value,
            "growth_rate": sc.qoe_params.growth_rate,
            "midpoint": sc.qoe_params.midpoint,
        },
        "catalog": [list(lvl.demand.components) for lvl in sc.catalog.levels],
        "servers": [
            {
                "id": s.id,
                "position": list(s.position),
                "radius": s.radius,
                "capacity": list(s.capacity.components),
            }
            for s in sc.servers
        ],
        "users": [{"id": u.id, "position": list(u.position)} for u in sc.users],
    }


def scenario_from_dict(doc: dict) -> Scenario:
    if doc.get("format") != SCENARIO_FORMAT:
        raise ValueError(f"not a scenario document (format {doc.get('format')!r})")
    if doc.get("version") != SCENARIO_VERSION:
        raise ValueError(f"unsupported scenario version {doc.get('version')!r}")
    try:
        metric = DistanceMetric(doc["metric"])
        params = QoEParams(
            max_value=doc["qoe"]["max_value"],
            growth_rate=doc["qoe"]["growth_rate"],
            midpoint=doc["qoe"]["midpoint"],
        )
        catalog = QoSCatalog.from_demands(doc["catalog"], params)
        servers = tuple(
            EdgeServer(
                id=s["id"],
                position=tuple(s["position"]),
                radius=s["radius"],
                capacity=ResourceVector(s["capacity"]),
            )
            for s in doc["servers"]
        )
        users = tuple(
            User(
                id=u["id"],
                position=tuple(u["position"]),
                candidate_servers=candidate_servers(
                    User(id=u["id"], position=tuple(u["position"])), servers, metric
                ),
            )
            for u in doc["users"]
        )
        return Scenario(
            users=users,
            servers=servers,
            catalog=catalog,
            qoe_params=params,
            metric=metric,
            seed=doc.get("seed", 0),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed scenario document: {exc}") from None


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: not a scenario document")
    return scenario_from_dict(doc)


def scenario_digest(sc: Scenario) -> str:
    """Short stable content hash; identical scenarios hash identically."""
    blob = json.dumps(scenario_to_dict(sc), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

"""Distances and coverage: which servers can serve which users.

A server covers a user when the distance between their positions is at most
the server's coverage radius (boundary inclusive).  Two metrics are
supported: planar Euclidean for synthetic layouts, and great-circle
(haversine) for geographic latitude/longitude data, returning meters.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable

from .model import EdgeServer, User

EARTH_RADIUS_M = 6_371_000.0


class DistanceMetric(Enum):
    PLANAR = "planar"
    GREAT_CIRCLE = "greatcircle"


def distance(
    a: tuple[float, float], b: tuple[float, float], metric: DistanceMetric
) -> float:
    """Distance between two coordinate pairs.

    Planar positions are (x, y) in arbitrary but shared units; great-circle
    positions are (latitude, longitude) in degrees and the result is meters
    on a sphere of radius 6,371,000 m.  Raises ``ValueError`` on non-finite
    coordinates, or on out-of-range latitude/longitude for great-circle.
    """
    for p in (a, b):
        if len(p) != 2 or not all(math.isfinite(c) for c in p):
            raise ValueError(f"coordinate pair {p!r} is not finite")
    if metric is DistanceMetric.PLANAR:
        return math.hypot(a[0] - b[0], a[1] - b[1])
    if metric is DistanceMetric.GREAT_CIRCLE:
        for lat, lon in (a, b):
            if not -90.0 <= lat <= 90.0:
                raise ValueError(f"latitude {lat} outside [-90, 90]")
            if not -180.0 <= lon <= 180.0:
                raise ValueError(f"longitude {lon} outside [-180, 180]")
        return _haversine(a, b)
    raise ValueError(f"unknown metric {metric!r}")


def _haversine(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    # rounding can push h a hair past 1 for antipodal points
    h = min(1.0, h)
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def candidate_servers(
    user: User, servers: Iterable[EdgeServer], metric: DistanceMetric
) -> frozenset[int]:
    """Ids of the servers whose coverage disk contains the user."""
    return frozenset(
        s.id
        for s in servers
        if distance(user.position, s.position, metric) <= s.radius
    )


def coverable_users(
    server: EdgeServer, users: Iterable[User], metric: DistanceMetric
) -> frozenset[int]:
    """Ids of the users inside the server's coverage disk."""
    return frozenset(
        u.id
        for u in users
        if distance(u.position, server.position, metric) <= server.radius
    )

"""Build the bundled synthetic downtown dataset.

Lays a jittered grid of base stations over a ~2 km x 1.5 km city-center
box and scatters end-user positions across it, then writes the two CSVs
the scenario generator consumes:

    stations.csv  id,lat,lon,radius_m
    users.csv     id,lat,lon

Coverage radii are drawn between 150 m and 330 m, so neighbouring disks
overlap and most users can reach one to four stations while a few near the
box edge fall outside every disk (they end up on the cloud fallback).
The fixed seed makes the output reproducible byte for byte; the repository
data/ directory was produced by exactly this script.

Run:  python demos/00_build_city_dataset.py [out_dir]
"""

import csv
import math
import sys
from pathlib import Path

import numpy as np

SEED = 20240604
CENTER_LAT = -37.8136
CENTER_LON = 144.9631
GRID_COLS = 8
GRID_ROWS = 6
SPACING_M = 260.0
USERS = 2500

M_PER_DEG_LAT = 111_195.0


def main(out_dir: str = "data") -> None:
    rng = np.random.Generator(np.random.PCG64(SEED))
    m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(CENTER_LAT))
    dlat = SPACING_M / M_PER_DEG_LAT
    dlon = SPACING_M / m_per_deg_lon

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    # stations: grid + up to 40 m of jitter, radii 150-330 m
    stations = []
    sid = 1
    for r in range(GRID_ROWS):
        for c in range(GRID_COLS):
            lat = CENTER_LAT + (r - (GRID_ROWS - 1) / 2) * dlat
            lon = CENTER_LON + (c - (GRID_COLS - 1) / 2) * dlon
            lat += rng.uniform(-40, 40) / M_PER_DEG_LAT
            lon += rng.uniform(-40, 40) / m_per_deg_lon
            radius = float(rng.uniform(150.0, 330.0))
            stations.append((sid, round(lat, 6), round(lon, 6), round(radius, 1)))
            sid += 1

    # users: uniform over the grid box plus a 150 m fringe
    fringe_lat = 150.0 / M_PER_DEG_LAT
    fringe_lon = 150.0 / m_per_deg_lon
    lat_lo = CENTER_LAT - (GRID_ROWS - 1) / 2 * dlat - fringe_lat
    lat_hi = CENTER_LAT + (GRID_ROWS - 1) / 2 * dlat + fringe_lat
    lon_lo = CENTER_LON - (GRID_COLS - 1) / 2 * dlon - fringe_lon
    lon_hi = CENTER_LON + (GRID_COLS - 1) / 2 * dlon + fringe_lon
    users = []
    for uid in range(1, USERS + 1):
        lat = float(rng.uniform(lat_lo, lat_hi))
        lon = float(rng.uniform(lon_lo, lon_hi))
        users.append((uid, round(lat, 6), round(lon, 6)))

    with open(out / "stations.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "lat", "lon", "radius_m"])
        w.writerows(stations)
    with open(out / "users.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "lat", "lon"])
        w.writerows(users)

    print(f"wrote {len(stations)} stations and {len(users)} users to {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:2])

"""Distance metrics and coverage derivation."""

import math

import numpy as np
import pytest

from edgealloc import DistanceMetric, EdgeServer, ResourceVector, User, distance
from edgealloc.geometry import EARTH_RADIUS_M, candidate_servers, coverable_users

PLANAR = DistanceMetric.PLANAR
GC = DistanceMetric.GREAT_CIRCLE


def _server(sid, pos, radius):
    return EdgeServer(id=sid, position=pos, radius=radius, capacity=ResourceVector((1,)))


class TestDistance:
    def test_identity(self):
        assert distance((3.0, 4.0), (3.0, 4.0), PLANAR) == 0.0
        assert distance((10.0, 20.0), (10.0, 20.0), GC) == 0.0

    def test_planar_pythagorean_triple(self):
        assert distance((0.0, 0.0), (3.0, 4.0), PLANAR) == 5.0

    def test_one_equator_degree(self):
        # closed form: one degree of longitude on the equator
        expected = EARTH_RADIUS_M * math.pi / 180.0
        got = distance((0.0, 0.0), (0.0, 1.0), GC)
        assert got == pytest.approx(111_195.0, abs=10.0)
        assert got == pytest.approx(expected, abs=1e-6)

    def test_symmetry_and_nonnegativity(self):
        rng = np.random.default_rng(11)
        for metric in (PLANAR, GC):
            for _ in range(100):
                a = (float(rng.uniform(-80, 80)), float(rng.uniform(-170, 170)))
                b = (float(rng.uniform(-80, 80)), float(rng.uniform(-170, 170)))
                ab = distance(a, b, metric)
                assert ab >= 0.0
                assert ab == pytest.approx(distance(b, a, metric), abs=0.0)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(12)
        for metric in (PLANAR, GC):
            for _ in range(200):
                pts = [
                    (float(rng.uniform(-80, 80)), float(rng.uniform(-170, 170)))
                    for _ in range(3)
                ]
                ab = distance(pts[0], pts[1], metric)
                bc = distance(pts[1], pts[2], metric)
                ac = distance(pts[0], pts[2], metric)
                assert ac <= ab + bc + 1e-6

    def test_great_circle_bounds_checked(self):
        with pytest.raises(ValueError):
            distance((91.0, 0.0), (0.0, 0.0), GC)
        with pytest.raises(ValueError):
            distance((0.0, 181.0), (0.0, 0.0), GC)
        with pytest.raises(ValueError):
            distance((float("nan"), 0.0), (0.0, 0.0), PLANAR)


class TestCoverage:
    def test_user_covered_by_nobody(self):
        u = User(id=1, position=(100.0, 100.0))
        servers = [_server(1, (0.0, 0.0), 5.0)]
        assert candidate_servers(u, servers, PLANAR) == frozenset()

    def test_colocated_user_is_covered(self):
        u = User(id=1, position=(2.0, 2.0))
        servers = [_server(1, (2.0, 2.0), 0.5)]
        assert candidate_servers(u, servers, PLANAR) == {1}

    def test_boundary_is_inclusive(self):
        u = User(id=1, position=(3.0, 0.0))
        servers = [_server(1, (0.0, 0.0), 3.0)]
        assert candidate_servers(u, servers, PLANAR) == {1}

    def test_zero_radius_server_covers_colocated_only(self):
        s = _server(1, (1.0, 1.0), 0.0)
        users = [User(id=1, position=(1.0, 1.0)), User(id=2, position=(1.0, 1.1))]
        assert coverable_users(s, users, PLANAR) == {1}
        assert coverable_users(s, [users[1]], PLANAR) == frozenset()

    def test_overlapping_city_block_topology(self):
        # three overlapping downtown disks plus one remote server: the user
        # in the overlap sees all three, the first server sees exactly its
        # four neighbours
        servers = [
            _server(1, (0.0, 0.0), 5.0),
            _server(2, (6.0, 0.0), 5.0),
            _server(3, (3.0, 5.0), 5.0),
            _server(4, (20.0, 0.0), 3.0),
        ]
        users = {
            1: User(id=1, position=(-3.0, 0.0)),
            2: User(id=2, position=(3.0, 9.0)),
            3: User(id=3, position=(3.0, 2.0)),
            4: User(id=4, position=(3.0, 1.0)),
            5: User(id=5, position=(0.0, -4.0)),
            6: User(id=6, position=(8.0, 3.0)),
            7: User(id=7, position=(20.0, 1.0)),
            8: User(id=8, position=(21.0, 0.0)),
            9: User(id=9, position=(19.0, -1.0)),
            10: User(id=10, position=(25.0, 0.0)),
        }
        assert candidate_servers(users[3], servers, PLANAR) == {1, 2, 3}
        assert candidate_servers(users[4], servers, PLANAR) == {1, 2, 3}
        assert coverable_users(servers[0], users.values(), PLANAR) == {1, 3, 4, 5}
        assert candidate_servers(users[10], servers, PLANAR) == frozenset()

    def test_duality_on_random_layouts(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            servers = [
                _server(j + 1, (float(rng.uniform(0, 1)), float(rng.uniform(0, 1))),
                        float(rng.uniform(0, 0.5)))
                for j in range(int(rng.integers(0, 6)))
            ]
            users = [
                User(id=i + 1, position=(float(rng.uniform(0, 1)), float(rng.uniform(0, 1))))
                for i in range(int(rng.integers(0, 8)))
            ]
            for u in users:
                for s in servers:
                    in_cand = s.id in candidate_servers(u, servers, PLANAR)
                    in_cov = u.id in coverable_users(s, users, PLANAR)
                    assert in_cand == in_cov

    def test_growing_radius_never_shrinks_coverage(self):
        rng = np.random.default_rng(14)
        users = [
            User(id=i + 1, position=(float(rng.uniform(0, 1)), float(rng.uniform(0, 1))))
            for i in range(30)
        ]
        for _ in range(30):
            pos = (float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
            r1 = float(rng.uniform(0, 0.5))
            r2 = r1 + float(rng.uniform(0, 0.5))
            small = coverable_users(_server(1, pos, r1), users, PLANAR)
            large = coverable_users(_server(1, pos, r2), users, PLANAR)
            assert small <= large

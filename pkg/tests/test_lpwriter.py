"""LP text export: structure, coefficients, proximity pinning."""

import re

import pytest

from edgealloc import build_lp, write_lp
from helpers import motivating_instance, planar_scenario


class TestBuildLp:
    def test_motivating_instance_layout(self):
        sc = motivating_instance()
        text = build_lp(sc)
        assert text.startswith("\\")
        for section in ("Maximize", "Subject To", "Binary", "End"):
            assert section in text
        # objective carries each tier's QoE for both users
        for lvl in sc.catalog.levels:
            assert text.count(repr(lvl.qoe)) == 2
        # one capacity row per (server, dimension), one choice row per user
        assert len(re.findall(r"cap_s4_\w+:", text)) == 4
        assert "one_u7:" in text and "one_u8:" in text
        assert "<= 6" in text and "<= 9" in text and "<= 7" in text and "<= 8" in text

    def test_every_variable_is_declared_binary(self):
        sc = motivating_instance()
        text = build_lp(sc)
        used = set(re.findall(r"x_u\d+_s\d+_l\d+", text))
        binary_section = text.split("Binary")[1]
        declared = set(re.findall(r"x_u\d+_s\d+_l\d+", binary_section))
        assert used == declared
        # 2 users x 1 server x 3 tiers
        assert len(declared) == 6

    def test_out_of_coverage_pairs_are_pinned_to_zero(self):
        sc = planar_scenario(
            users=[(1, (0.0, 0.0)), (2, (10.0, 0.0))],
            servers=[
                (1, (0.0, 0.0), 1.0, (9, 9, 9, 9)),
                (2, (10.0, 0.0), 1.0, (9, 9, 9, 9)),
            ],
        )
        text = build_lp(sc)
        bounds = text.split("\nBounds\n")[1].split("\nBinary\n")[0]
        # user 1 cannot reach server 2 and vice versa: 2 pairs x 3 tiers
        assert len(re.findall(r"x_u\d+_s\d+_l\d+ = 0", bounds)) == 6
        assert "x_u1_s2_l1 = 0" in bounds
        assert "x_u2_s1_l3 = 0" in bounds
        # covered pairs are not pinned
        assert "x_u1_s1_l1 = 0" not in bounds

    def test_demand_coefficients_match_catalog(self):
        sc = motivating_instance()
        text = build_lp(sc)
        ram_row = next(line for line in text.splitlines() if "cap_s4_ram" in line)
        assert "2 x_u7_s4_l1" in ram_row
        assert "3 x_u7_s4_l2" in ram_row
        assert "7 x_u7_s4_l3" in ram_row
        assert ram_row.rstrip().endswith("<= 9")

    def test_oversized_export_rejected(self):
        from edgealloc import (
            DistanceMetric,
            EdgeServer,
            ResourceVector,
            Scenario,
            User,
            default_catalog,
            default_qoe_params,
        )

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
            build_lp(sc)

    def test_write_lp_round_trips_text(self, tmp_path):
        sc = motivating_instance()
        path = tmp_path / "instance.lp"
        write_lp(sc, path)
        assert path.read_text(encoding="utf-8") == build_lp(sc)

import json
import math

import numpy as np
import pytest

from udgloc.geometry import Point
from udgloc.network import (
    GenerationError,
    GraphFormatError,
    NoiseModel,
    WheelGeometryError,
    apply_noise,
    check_udg_property,
    default_rim_radius,
    generate_random_udg,
    generate_wheel,
    generate_wheel_network,
    load_graph,
    ranging_bias,
    save_graph,
    udg_from_positions,
)


class TestRangingBias:
    def test_zero_range(self):
        assert ranging_bias(0.0) == pytest.approx(-0.038)

    def test_log_argument_of_e(self):
        # 0.022 * ln(e) - 0.038
        assert ranging_bias(math.e - 1.0) == pytest.approx(-0.016, abs=1e-12)

    def test_range_ten(self):
        # 0.022 * ln(11) - 0.038, cross-checked against 50-digit arithmetic
        assert ranging_bias(10.0) == pytest.approx(0.014753696001564152, abs=1e-15)

    def test_rejects_negative_range(self):
        with pytest.raises(ValueError):
            ranging_bias(-0.1)


class TestUdgConstruction:
    def test_edges_follow_the_disk_rule(self):
        pts = [Point(0, 0), Point(1, 0), Point(2.5, 0), Point(0, 0.9)]
        g = udg_from_positions(pts, 1.0)
        assert g.has_edge(0, 1)
        assert g.has_edge(0, 3)
        assert not g.has_edge(0, 2)
        assert not g.has_edge(1, 2)  # distance 1.5
        assert g.deltas[(0, 1)] == pytest.approx(1.0)
        check_udg_property(g)

    def test_huge_theta_gives_complete_graph(self):
        rng = np.random.default_rng(0)
        pts = [Point(*p) for p in rng.uniform(0, 10, size=(12, 2))]
        g = udg_from_positions(pts, 1e9)
        assert g.edge_count == 12 * 11 // 2
        assert g.avg_degree == pytest.approx(11.0)

    def test_neighbor_lists_ascend(self):
        g = generate_random_udg(30, 50.0, 6.0, rng_seed=4)
        for nbrs in g.neighbors:
            assert list(nbrs) == sorted(nbrs)

    def test_rejects_nonfinite_positions(self):
        with pytest.raises(ValueError):
            udg_from_positions([Point(0, 0), Point(float("nan"), 1)], 1.0)


class TestApplyNoise:
    def test_zero_magnitude_is_pure_bias(self):
        g = generate_random_udg(20, 30.0, 5.0, rng_seed=9)
        noisy = apply_noise(g, NoiseModel(0.0, g.theta, rng_seed=1))
        bias = ranging_bias(g.theta)
        for e, d in g.deltas.items():
            assert noisy.deltas[e] == d + bias

    def test_deterministic_for_fixed_seed(self):
        g = generate_random_udg(25, 40.0, 5.0, rng_seed=2)
        m = NoiseModel(10.0, g.theta, rng_seed=77)
        assert apply_noise(g, m) == apply_noise(g, m)

    def test_different_seeds_differ(self):
        g = generate_random_udg(25, 40.0, 5.0, rng_seed=2)
        a = apply_noise(g, NoiseModel(10.0, g.theta, rng_seed=1))
        b = apply_noise(g, NoiseModel(10.0, g.theta, rng_seed=2))
        assert a != b

    def test_rejects_already_noisy_graph(self):
        g = generate_random_udg(20, 30.0, 5.0, rng_seed=9)
        noisy = apply_noise(g, NoiseModel(5.0, g.theta, rng_seed=1))
        with pytest.raises(ValueError, match="noiseless"):
            apply_noise(noisy, NoiseModel(5.0, g.theta, rng_seed=1))

    def test_deltas_clamped_positive(self):
        # bias at theta=0.5 is about -0.029, far below this tiny edge length
        pts = [Point(0, 0), Point(1e-6, 0), Point(0.3, 0.3), Point(0.3, 0.2)]
        g = udg_from_positions(pts, 0.5)
        noisy = apply_noise(g, NoiseModel(0.0, g.theta, rng_seed=0))
        assert all(d > 0 for d in noisy.deltas.values())
        assert noisy.deltas[(0, 1)] == 1e-9

    def test_statistics_match_the_model(self):
        # dense deployment: every pair within range -> lots of edges
        rng = np.random.default_rng(5)
        pts = [Point(x, y) for x, y in rng.uniform(0, 7.0, size=(130, 2))]
        g = udg_from_positions(pts, 10.0)
        assert g.edge_count >= 8000
        noisy = apply_noise(g, NoiseModel(10.0, 10.0, rng_seed=11))
        errs = np.array([noisy.deltas[e] - g.deltas[e] for e in sorted(g.deltas)])
        se = errs.std(ddof=1) / math.sqrt(len(errs))
        assert abs(errs.mean() - ranging_bias(10.0)) <= 3 * se
        assert abs(errs.std(ddof=1) - 0.10) <= 0.005

    def test_variance_reading_widens_spread(self):
        g = generate_random_udg(40, 30.0, 10.0, rng_seed=6)
        std_model = NoiseModel(10.0, g.theta, rng_seed=3)
        var_model = NoiseModel(10.0, g.theta, rng_seed=3, p_is_variance=True)
        assert var_model.std == pytest.approx(math.sqrt(0.1))
        assert std_model.std == pytest.approx(0.1)

    def test_rejects_negative_magnitude(self):
        with pytest.raises(ValueError):
            NoiseModel(-1.0, 1.0, rng_seed=0)


class TestGenerateRandomUdg:
    def test_rejects_tiny_networks(self):
        with pytest.raises(ValueError):
            generate_random_udg(2, 10.0, 1.0, rng_seed=0)

    def test_rejects_unreachable_degree(self):
        with pytest.raises(ValueError):
            generate_random_udg(100, 10.0, 99.5, rng_seed=0)

    @pytest.mark.parametrize("target", [4.0, 8.0, 15.0])
    def test_hits_target_degree(self, target):
        g = generate_random_udg(100, 100.0, target, rng_seed=3)
        assert abs(g.avg_degree - target) <= 0.1
        check_udg_property(g)

    def test_deterministic(self):
        a = generate_random_udg(50, 100.0, 6.0, rng_seed=12)
        b = generate_random_udg(50, 100.0, 6.0, rng_seed=12)
        assert a == b

    def test_positions_inside_area(self):
        g = generate_random_udg(60, 25.0, 5.0, rng_seed=8)
        for p in g.positions:
            assert 0.0 <= p.x <= 25.0 and 0.0 <= p.y <= 25.0


class TestGenerateWheel:
    def test_valid_wheel_k6(self):
        g = generate_wheel(6, 1.0, 0.8)
        assert g.n == 7
        assert g.edge_count == 12
        degrees = [len(nbrs) for nbrs in g.neighbors]
        assert degrees[0] == 6
        assert degrees[1:] == [3] * 6

    def test_chords_appear_when_rim_too_small(self):
        # skip chord 2*0.5*sin(60deg) ~ 0.866 <= 1 would create extra edges
        with pytest.raises(WheelGeometryError, match="skip chord"):
            generate_wheel(6, 1.0, 0.5)

    def test_rim_beyond_sensing_range(self):
        with pytest.raises(WheelGeometryError, match="spoke"):
            generate_wheel(6, 1.0, 1.5)

    def test_adjacent_chord_failure_named(self):
        # k=4 with r close to theta: adjacent chord r*sqrt(2) > theta
        with pytest.raises(WheelGeometryError, match="adjacent"):
            generate_wheel(4, 1.0, 0.99)

    def test_too_few_rim_nodes(self):
        with pytest.raises(WheelGeometryError):
            generate_wheel(3, 1.0, 0.8)

    @pytest.mark.parametrize("k", [4, 5, 6, 8, 11])
    def test_scan_finds_exactly_2k_edges(self, k):
        r = default_rim_radius(k, 1.0)
        g = generate_wheel(k, 1.0, r)
        assert g.edge_count == 2 * k
        check_udg_property(g)

    def test_default_rim_radius_infeasible_for_large_k(self):
        with pytest.raises(WheelGeometryError):
            default_rim_radius(12, 1.0)


class TestGenerateWheelNetwork:
    def test_single_wheel_matches_generate_wheel(self):
        r = default_rim_radius(6, 1.0)
        assert generate_wheel_network(1, 6, 1.0, rng_seed=0) == generate_wheel(6, 1.0, r)

    def test_rejects_zero_wheels(self):
        with pytest.raises(ValueError):
            generate_wheel_network(0, 6, 1.0, rng_seed=0)

    @pytest.mark.parametrize("count,k", [(2, 6), (4, 6), (3, 5), (4, 7), (3, 8)])
    def test_chain_structure(self, count, k):
        g = generate_wheel_network(count, k, 1.0, rng_seed=5)
        assert g.n == 1 + k + (count - 1) * (k - 1)
        assert g.edge_count == 2 * k * count - (count - 1)
        check_udg_property(g)

    @pytest.mark.parametrize("k", [4, 9, 10])
    def test_unchainable_rim_counts_rejected(self, k):
        with pytest.raises(WheelGeometryError, match="chain"):
            generate_wheel_network(2, k, 1.0, rng_seed=0)

    def test_explicit_radius_outside_chain_window_rejected(self):
        # fine for a single wheel, but mirrored neighbors would collide
        generate_wheel(8, 1.0, 0.85)
        with pytest.raises(WheelGeometryError, match="chain"):
            generate_wheel_network(3, 8, 1.0, rng_seed=0, rim_radius=0.85)

    def test_chain_is_connected(self):
        g = generate_wheel_network(4, 6, 1.0, rng_seed=5)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in g.neighbors[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        assert len(seen) == g.n

    def test_deterministic(self):
        a = generate_wheel_network(4, 6, 1.0, rng_seed=5)
        b = generate_wheel_network(4, 6, 1.0, rng_seed=5)
        assert a == b


class TestGraphFiles:
    def test_round_trip_identity(self, tmp_path):
        g = generate_random_udg(40, 50.0, 6.0, rng_seed=21)
        path = tmp_path / "g.json"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_round_trip_preserves_noise(self, tmp_path):
        g = generate_random_udg(30, 50.0, 6.0, rng_seed=22)
        noisy = apply_noise(g, NoiseModel(10.0, g.theta, rng_seed=4))
        path = tmp_path / "noisy.json"
        save_graph(noisy, path)
        assert load_graph(path) == noisy

    def test_edge_beyond_theta_rejected(self, tmp_path):
        g = generate_random_udg(20, 50.0, 5.0, rng_seed=23)
        path = tmp_path / "bad.json"
        save_graph(g, path)
        doc = json.loads(path.read_text())
        # find a pair with no edge (they are farther than theta) and add it
        present = {(e["u"], e["v"]) for e in doc["edges"]}
        pair = next(
            (u, v)
            for u in range(g.n)
            for v in range(u + 1, g.n)
            if (u, v) not in present
        )
        doc["edges"].append({"u": pair[0], "v": pair[1], "delta": 1.0})
        path.write_text(json.dumps(doc))
        with pytest.raises(GraphFormatError, match=f"edge \\({pair[0]}, {pair[1]}\\)"):
            load_graph(path)

    def test_missing_edge_within_theta_rejected(self, tmp_path):
        g = generate_random_udg(20, 50.0, 5.0, rng_seed=23)
        path = tmp_path / "bad.json"
        save_graph(g, path)
        doc = json.loads(path.read_text())
        dropped = doc["edges"].pop(0)
        path.write_text(json.dumps(doc))
        with pytest.raises(GraphFormatError, match="no edge"):
            load_graph(path)
        assert dropped["delta"] > 0

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{not json")
        with pytest.raises(GraphFormatError, match="JSON"):
            load_graph(path)

    def test_sparse_ids_rejected(self, tmp_path):
        path = tmp_path / "ids.json"
        path.write_text(json.dumps({
            "theta": 1.0,
            "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 2, "x": 5, "y": 5}],
            "edges": [],
        }))
        with pytest.raises(GraphFormatError, match="dense"):
            load_graph(path)

    def test_nonpositive_delta_rejected(self, tmp_path):
        path = tmp_path / "neg.json"
        path.write_text(json.dumps({
            "theta": 10.0,
            "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}],
            "edges": [{"u": 0, "v": 1, "delta": -0.5}],
        }))
        with pytest.raises(GraphFormatError, match="delta"):
            load_graph(path)

    def test_unordered_edge_endpoints_rejected(self, tmp_path):
        path = tmp_path / "order.json"
        path.write_text(json.dumps({
            "theta": 10.0,
            "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}],
            "edges": [{"u": 1, "v": 0, "delta": 1.0}],
        }))
        with pytest.raises(GraphFormatError, match="u < v"):
            load_graph(path)

import math

import numpy as np
import pytest

from udgloc.geometry import Point
from udgloc.localizer import AlgorithmConfig, Formation, PlacementRecord, localize_graph
from udgloc.metrics import mean_offset, recall
from udgloc.network import generate_random_udg, generate_wheel, udg_from_positions


def formation_from(positions: dict[int, Point]) -> Formation:
    f = Formation()
    for node, pos in positions.items():
        f.add(PlacementRecord(node=node, method="seed", position=pos))
    return f


def square_graph():
    pts = [Point(0, 0), Point(4, 0), Point(4, 4), Point(0, 4), Point(2, 1)]
    return udg_from_positions(pts, 10.0)


class TestRecall:
    def test_empty_formation(self):
        g = generate_random_udg(10, 20.0, 3.0, rng_seed=1)
        assert recall(Formation(), g) == 0.0

    def test_full_formation(self):
        g = square_graph()
        f = formation_from({i: p for i, p in enumerate(g.positions)})
        assert recall(f, g) == 100.0

    def test_partial_formation(self):
        g = generate_random_udg(100, 100.0, 8.0, rng_seed=2)
        f = formation_from({i: g.positions[i] for i in range(99)})
        assert recall(f, g) == pytest.approx(99.0)


class TestMeanOffset:
    def test_perfect_estimates(self):
        g = square_graph()
        f = formation_from({i: p for i, p in enumerate(g.positions)})
        assert mean_offset(f, g) == 0.0
        assert mean_offset(f, g, align="rigid") == pytest.approx(0.0, abs=1e-9)

    def test_constant_shift(self):
        g = square_graph()
        f = formation_from({i: Point(p.x + 1, p.y + 1) for i, p in enumerate(g.positions)})
        assert mean_offset(f, g) == pytest.approx(math.sqrt(2.0))
        assert mean_offset(f, g, align="rigid") == pytest.approx(0.0, abs=1e-9)

    def test_rotation_about_centroid(self):
        g = square_graph()
        true = np.asarray(g.positions)
        c = true.mean(axis=0)
        ang = math.radians(30.0)
        rot = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        est = (true - c) @ rot.T + c
        f = formation_from({i: Point(*est[i]) for i in range(len(true))})
        # chord of a 30-degree arc: each point moves 2*sin(15deg)*radius
        expected = float(np.mean(2.0 * math.sin(ang / 2) * np.hypot(*(true - c).T)))
        assert mean_offset(f, g) == pytest.approx(expected, rel=1e-12)
        assert mean_offset(f, g, align="rigid") == pytest.approx(0.0, abs=1e-9)

    def test_reflection_absorbed_by_rigid_alignment(self):
        g = square_graph()
        f = formation_from({i: Point(-p.x, p.y) for i, p in enumerate(g.positions)})
        assert mean_offset(f, g) > 1.0
        assert mean_offset(f, g, align="rigid") == pytest.approx(0.0, abs=1e-9)

    def test_subset_of_nodes_only(self):
        g = square_graph()
        f = formation_from({0: Point(1, 0), 2: Point(4, 4)})
        assert mean_offset(f, g) == pytest.approx(0.5)

    def test_relabeling_invariance(self):
        g = square_graph()
        est = {i: Point(p.x + 0.5, p.y) for i, p in enumerate(g.positions)}
        a = formation_from(est)
        b = Formation()
        for node in reversed(list(est)):
            b.add(PlacementRecord(node=node, method="seed", position=est[node]))
        assert mean_offset(a, g) == pytest.approx(mean_offset(b, g))

    def test_coincident_estimates_fall_back_to_translation(self):
        g = square_graph()
        f = formation_from({i: Point(7.0, 7.0) for i in range(g.n)})
        got = mean_offset(f, g, align="rigid")
        true = np.asarray(g.positions)
        c = true.mean(axis=0)
        assert got == pytest.approx(float(np.mean(np.hypot(*(true - c).T))))

    def test_rigid_alignment_never_raises_squared_error(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            m = rng.integers(2, 12)
            true_pts = rng.uniform(0, 10, size=(m, 2))
            est_pts = rng.uniform(0, 10, size=(m, 2))
            pts = [Point(*p) for p in true_pts]
            g = udg_from_positions(pts, 100.0)
            f = formation_from({i: Point(*est_pts[i]) for i in range(m)})
            # optimality guarantee is in the least-squares sense
            def sse(align):
                nodes = [r.node for r in f.records]
                if align == "none":
                    est = est_pts
                else:
                    from udgloc.metrics import _rigid_align
                    est = _rigid_align(est_pts, true_pts)
                return float(np.sum((est - true_pts) ** 2))
            assert sse("rigid") <= sse("none") + 1e-9

    def test_empty_formation_rejected(self):
        g = square_graph()
        with pytest.raises(ValueError):
            mean_offset(Formation(), g)

    def test_rigid_needs_two_points(self):
        g = square_graph()
        f = formation_from({0: Point(0, 0)})
        with pytest.raises(ValueError):
            mean_offset(f, g, align="rigid")

    def test_unknown_align_rejected(self):
        g = square_graph()
        f = formation_from({0: Point(0, 0)})
        with pytest.raises(ValueError):
            mean_offset(f, g, align="fancy")


class TestEndToEndOffsets:
    def test_anchored_noiseless_offset_is_tiny(self):
        g = generate_random_udg(60, 80.0, 9.0, rng_seed=5)
        f = localize_graph(g, AlgorithmConfig(seed_triple_cap=25))
        assert len(f) >= 3
        assert mean_offset(f, g) < 1e-6 * g.theta

    def test_relative_frame_needs_alignment(self):
        g = generate_wheel(6, 1.0, 0.8)
        f = localize_graph(g, AlgorithmConfig(seed_placement="relative"))
        assert len(f) == 7
        assert mean_offset(f, g, align="rigid") < 1e-9

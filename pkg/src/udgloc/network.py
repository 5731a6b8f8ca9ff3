"""Deployments, unit-disk connectivity, range noise, and graph files.

A deployment is a set of true node positions plus a sensing range theta;
two nodes share an edge exactly when they are within theta of each other.
Edge weights ("deltas") are the measured ranges: equal to the true
distances at generation time, and perturbed by :func:`apply_noise`
afterwards. Graphs are immutable; noise application returns a new graph.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .geometry import Point

log = logging.getLogger("udgloc")

#: Measured ranges are clamped to this floor so Gaussian tails cannot
#: produce zero or negative distances.
MIN_DELTA = 1e-9

_GENERATION_RETRIES = 32


class GraphFormatError(ValueError):
    """A graph file is malformed or breaks the unit-disk property."""


class WheelGeometryError(ValueError):
    """Requested wheel parameters cannot be realized as a unit-disk graph."""


class GenerationError(RuntimeError):
    """Random generation failed to meet its target after retries."""


@dataclass(frozen=True)
class WsnGraph:
    """Immutable deployment: true positions, sensing range, measured edges.

    ``deltas`` maps each unordered edge (u, v) with u < v to its measured
    range. ``neighbors[i]`` lists i's neighbors in ascending id order, which
    keeps every downstream run reproducible.
    """

    theta: float
    positions: tuple[Point, ...]
    deltas: Mapping[tuple[int, int], float]
    neighbors: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def edge_count(self) -> int:
        return len(self.deltas)

    @property
    def avg_degree(self) -> float:
        return 2.0 * len(self.deltas) / len(self.positions)

    @cached_property
    def pos_array(self) -> np.ndarray:
        """True positions as an (n, 2) float array."""
        arr = np.asarray(self.positions, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean (n, n) adjacency matrix."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.deltas:
            adj[u, v] = adj[v, u] = True
        adj.setflags(write=False)
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.deltas if u < v else (v, u) in self.deltas

    def delta(self, u: int, v: int) -> float:
        """Measured range between two adjacent nodes."""
        return self.deltas[(u, v)] if u < v else self.deltas[(v, u)]

    def true_distance(self, u: int, v: int) -> float:
        pu, pv = self.positions[u], self.positions[v]
        return math.hypot(pu.x - pv.x, pu.y - pv.y)


def _pairwise_distances(pos: np.ndarray) -> np.ndarray:
    """Full (n, n) distance matrix; the single source of edge decisions.

    Edge membership must be decided by one arithmetic path everywhere
    (generation and file validation), otherwise a distance exactly at theta
    could flip across contexts.
    """
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _graph_from_positions(
    positions: Sequence[Point], theta: float, dist: np.ndarray
) -> WsnGraph:
    n = len(positions)
    deltas: dict[tuple[int, int], float] = {}
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if dist[u, v] <= theta:
                deltas[(u, v)] = float(dist[u, v])
                nbrs[u].append(v)
                nbrs[v].append(u)
    return WsnGraph(
        theta=float(theta),
        positions=tuple(Point(float(p[0]), float(p[1])) for p in positions),
        deltas=deltas,
        neighbors=tuple(tuple(lst) for lst in nbrs),
    )


def udg_from_positions(positions: Sequence[Point], theta: float) -> WsnGraph:
    """Build the unit-disk graph of a deployment, with noiseless ranges."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    pos = np.asarray([(p[0], p[1]) for p in positions], dtype=float)
    if not np.all(np.isfinite(pos)):
        raise ValueError("node positions must be finite")
    return _graph_from_positions(
        [Point(*p) for p in positions], theta, _pairwise_distances(pos)
    )


def check_udg_property(graph: WsnGraph) -> None:
    """Exhaustively verify edge <=> distance <= theta; raise on violation."""
    dist = _pairwise_distances(graph.pos_array)
    n = graph.n
    for u in range(n):
        for v in range(u + 1, n):
            present = (u, v) in graph.deltas
            within = dist[u, v] <= graph.theta
            if present and not within:
                raise GraphFormatError(
                    f"edge ({u}, {v}) present but nodes are {dist[u, v]:.6g} m "
                    f"apart, beyond theta={graph.theta:.6g}"
                )
            if within and not present:
                raise GraphFormatError(
                    f"nodes ({u}, {v}) are {dist[u, v]:.6g} m apart, within "
                    f"theta={graph.theta:.6g}, but have no edge"
                )


# ---------------------------------------------------------------------------
# Range noise


def ranging_bias(theta: float) -> float:
    """Mean ranging error for a given sensing range, in meters.

    Fitted to measured radio data: 0.022 * ln(1 + theta) - 0.038. Negative
    for short ranges, slightly positive for long ones.
    """
    if theta < 0:
        raise ValueError(f"sensing range must be non-negative, got {theta}")
    return 0.022 * math.log1p(theta) - 0.038


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian range-error model.

    Each edge's measured range gets one draw from
    N(ranging_bias(theta), (p_magnitude / 100)^2); ``p_magnitude`` is the
    error magnitude P as a percentage. Setting ``p_is_variance`` reads
    P/100 as the variance instead of the standard deviation (an alternative
    reading of the model; off by default).
    """

    p_magnitude: float
    theta: float
    rng_seed: int
    p_is_variance: bool = False

    def __post_init__(self) -> None:
        if self.p_magnitude < 0:
            raise ValueError(f"p_magnitude must be >= 0, got {self.p_magnitude}")
        if self.theta < 0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")

    @property
    def std(self) -> float:
        spread = self.p_magnitude / 100.0
        return math.sqrt(spread) if self.p_is_variance else spread


def apply_noise(graph: WsnGraph, model: NoiseModel) -> WsnGraph:
    """Perturb every measured range with one Gaussian draw per edge.

    The input graph must still carry noiseless ranges (deltas equal to true
    distances); noising twice would compound the model. Deterministic for a
    fixed (graph, model) pair, and clamps results to stay positive.
    """
    edges = sorted(graph.deltas)
    for u, v in edges:
        if not math.isclose(
            graph.deltas[(u, v)], graph.true_distance(u, v), rel_tol=1e-9, abs_tol=1e-12
        ):
            raise ValueError(
                f"apply_noise expects noiseless ranges; edge ({u}, {v}) "
                "already deviates from the true distance"
            )
    rng = np.random.default_rng(model.rng_seed)
    eps = rng.normal(ranging_bias(model.theta), model.std, size=len(edges))
    noisy = {
        (u, v): max(graph.deltas[(u, v)] + float(e), MIN_DELTA)
        for (u, v), e in zip(edges, eps)
    }
    return replace(graph, deltas=noisy)


# ---------------------------------------------------------------------------
# Generators


def generate_random_udg(
    n: int, area_side: float, target_avg_degree: float, rng_seed: int
) -> WsnGraph:
    """Uniform deployment on a square, sensing range tuned to a target degree.

    Positions are uniform in [0, area_side]^2; theta is then searched over
    the sorted pairwise distances so the average degree 2|E|/n lands within
    0.1 of ``target_avg_degree``. Degenerate deployments (ties at the
    threshold) are re-drawn a bounded number of times.
    """
    if n < 4:
        raise ValueError(f"need at least 4 nodes, got {n}")
    if not 0 < target_avg_degree < n - 1:
        raise ValueError(
            f"target average degree must be in (0, {n - 1}), got {target_avg_degree}"
        )
    if area_side <= 0:
        raise ValueError(f"area_side must be positive, got {area_side}")

    k = round(target_avg_degree * n / 2)
    if k < 1 or abs(2.0 * k / n - target_avg_degree) > 0.1 + 1e-12:
        raise ValueError(
            f"average degree {target_avg_degree} is not reachable within 0.1 "
            f"for n={n}: nearest achievable value is {2.0 * max(k, 1) / n}"
        )

    rng = np.random.default_rng(rng_seed)
    for _ in range(_GENERATION_RETRIES):
        pos = rng.uniform(0.0, area_side, size=(n, 2))
        dist = _pairwise_distances(pos)
        iu = np.triu_indices(n, k=1)
        ordered = np.sort(dist[iu])
        theta = float(ordered[k - 1])
        if theta <= 0.0:
            continue  # coincident points
        if k < len(ordered) and ordered[k] <= theta:
            continue  # tie at the threshold would overshoot the target
        graph = _graph_from_positions([Point(*p) for p in pos], theta, dist)
        assert graph.edge_count == k
        return graph
    raise GenerationError(
        f"could not hit average degree {target_avg_degree} for n={n} "
        f"after {_GENERATION_RETRIES} deployments"
    )


def _wheel_positions(k_rim: int, rim_radius: float, center: Point) -> list[Point]:
    pts = [Point(float(center[0]), float(center[1]))]
    for i in range(k_rim):
        ang = 2.0 * math.pi * i / k_rim
        pts.append(
            Point(center[0] + rim_radius * math.cos(ang), center[1] + rim_radius * math.sin(ang))
        )
    return pts


def _wheel_edge_set(hub: int, rim: Sequence[int]) -> set[tuple[int, int]]:
    edges = set()
    k = len(rim)
    for i, r in enumerate(rim):
        edges.add((min(hub, r), max(hub, r)))
        s = rim[(i + 1) % k]
        edges.add((min(r, s), max(r, s)))
    return edges


def generate_wheel(
    k_rim: int, theta: float, rim_radius: float, center: Point = Point(0.0, 0.0)
) -> WsnGraph:
    """A hub plus an evenly spaced rim cycle, realized as a unit-disk graph.

    Valid only when the hub-rim spokes and adjacent rim chords fit inside
    theta while every skip chord exceeds it; otherwise the resulting disk
    graph would gain or lose edges relative to a wheel, and the call is
    rejected naming the failed inequality. Node 0 is the hub, nodes
    1..k_rim run counterclockwise around the rim.
    """
    if k_rim < 4:
        raise WheelGeometryError(
            f"wheel needs at least 4 rim nodes to have missing chords, got {k_rim}"
        )
    if theta <= 0 or rim_radius <= 0:
        raise ValueError("theta and rim_radius must be positive")
    adjacent = 2.0 * rim_radius * math.sin(math.pi / k_rim)
    skip = 2.0 * rim_radius * math.sin(2.0 * math.pi / k_rim)
    failures = []
    if rim_radius > theta:
        failures.append(f"hub-rim spoke {rim_radius:.6g} > theta {theta:.6g}")
    if adjacent > theta:
        failures.append(f"adjacent rim chord {adjacent:.6g} > theta {theta:.6g}")
    if skip <= theta:
        failures.append(
            f"skip chord {skip:.6g} <= theta {theta:.6g} (would create a forbidden chord)"
        )
    if failures:
        raise WheelGeometryError("; ".join(failures))

    graph = udg_from_positions(_wheel_positions(k_rim, rim_radius, center), theta)
    intended = _wheel_edge_set(0, list(range(1, k_rim + 1)))
    if set(graph.deltas) != intended:
        raise WheelGeometryError(
            "wheel parameters sit on a floating-point boundary; "
            "the realized disk graph is not a wheel"
        )
    return graph


def default_rim_radius(k_rim: int, theta: float) -> float:
    """Midpoint of the rim radii that realize a k-spoke wheel at this theta."""
    if k_rim < 4:
        raise WheelGeometryError(f"wheel needs at least 4 rim nodes, got {k_rim}")
    lo = theta / (2.0 * math.sin(2.0 * math.pi / k_rim))
    hi = min(theta, theta / (2.0 * math.sin(math.pi / k_rim)))
    if lo >= hi:
        raise WheelGeometryError(
            f"no rim radius realizes a {k_rim}-spoke wheel at theta={theta:.6g}"
        )
    return 0.5 * (lo + hi)


def _chain_rim_radius_window(k_rim: int, theta: float) -> tuple[float, float]:
    """Open-below rim-radius interval that lets mirrored wheels share a chord.

    Beyond the single-wheel constraints, a chained wheel must keep its hub
    out of range of the previous hub, and the two rim nodes flanking a
    shared node (one per wheel) out of range of each other.
    """
    lo = max(
        theta / (2.0 * math.sin(2.0 * math.pi / k_rim)),  # skip chords
        theta / (4.0 * math.sin(math.pi / k_rim) * math.sin(2.0 * math.pi / k_rim)),
        theta / (2.0 * math.cos(math.pi / k_rim)),  # hub-hub separation
    )
    hi = min(theta, theta / (2.0 * math.sin(math.pi / k_rim)))
    return lo, hi


def chain_rim_radius(k_rim: int, theta: float) -> float:
    """Midpoint of the rim radii that allow chaining k-spoke wheels."""
    if k_rim < 4:
        raise WheelGeometryError(f"wheel needs at least 4 rim nodes, got {k_rim}")
    lo, hi = _chain_rim_radius_window(k_rim, theta)
    if lo >= hi - 1e-9 * theta:
        raise WheelGeometryError(
            f"{k_rim}-spoke wheels cannot be chained at theta={theta:.6g}: "
            "no rim radius keeps shared-chord mirrors out of each other's range"
        )
    return 0.5 * (lo + hi)


def generate_wheel_network(
    wheel_count: int,
    k_rim: int,
    theta: float,
    rng_seed: int,
    rim_radius: float | None = None,
) -> WsnGraph:
    """Chain of wheels, consecutive ones sharing two adjacent rim nodes.

    Each new wheel is the mirror image of the previous one across a
    randomly chosen rim chord, so the shared pair stays adjacent on both
    rims. Placement is re-rolled until the realized disk graph has exactly
    the intended wheel edges and nothing else.
    """
    if wheel_count < 1:
        raise ValueError(f"wheel_count must be >= 1, got {wheel_count}")
    if wheel_count == 1:
        if rim_radius is None:
            rim_radius = default_rim_radius(k_rim, theta)
        return generate_wheel(k_rim, theta, rim_radius, center=Point(0.0, 0.0))

    if rim_radius is None:
        rim_radius = chain_rim_radius(k_rim, theta)
    else:
        chain_rim_radius(k_rim, theta)  # rejects unchainable k outright
        lo, hi = _chain_rim_radius_window(k_rim, theta)
        if not lo < rim_radius <= hi:
            raise WheelGeometryError(
                f"rim radius {rim_radius:.6g} cannot chain {k_rim}-spoke wheels "
                f"at theta={theta:.6g}; needs a radius in ({lo:.6g}, {hi:.6g}]"
            )
    generate_wheel(k_rim, theta, rim_radius, center=Point(0.0, 0.0))  # validates

    rng = np.random.default_rng(rng_seed)
    for _ in range(_GENERATION_RETRIES):
        graph = _try_wheel_chain(wheel_count, k_rim, theta, rim_radius, rng)
        if graph is not None:
            return graph
    raise GenerationError(
        f"could not place {wheel_count} wheels without unintended proximity "
        f"after {_GENERATION_RETRIES} attempts"
    )


def _try_wheel_chain(
    wheel_count: int, k_rim: int, theta: float, rim_radius: float, rng: np.random.Generator
) -> WsnGraph | None:
    positions = _wheel_positions(k_rim, rim_radius, Point(0.0, 0.0))
    hub = 0
    rim_ids = list(range(1, k_rim + 1))
    intended = _wheel_edge_set(hub, rim_ids)
    inherited: tuple[int, int] | None = None

    for _ in range(wheel_count - 1):
        # Candidate chords of the newest wheel, minus the one it was born on.
        chords = [
            (rim_ids[i], rim_ids[(i + 1) % k_rim])
            for i in range(k_rim)
        ]
        chords = [
            c for c in chords
            if inherited is None or set(c) != set(inherited)
        ]
        a_id, b_id = chords[rng.integers(len(chords))]
        pa, pb = positions[a_id], positions[b_id]

        # Mirror the hub across the chord line; the reflected rim passes
        # through both shared nodes with the same spacing.
        ux, uy = pb.x - pa.x, pb.y - pa.y
        norm = math.hypot(ux, uy)
        ux, uy = ux / norm, uy / norm
        hx, hy = positions[hub].x - pa.x, positions[hub].y - pa.y
        t = hx * ux + hy * uy
        foot = (pa.x + t * ux, pa.y + t * uy)
        new_hub_pos = Point(2.0 * foot[0] - positions[hub].x, 2.0 * foot[1] - positions[hub].y)

        # Walk the new rim starting at the shared pair; step direction is
        # chosen so the second sample lands on B.
        start = math.atan2(pa.y - new_hub_pos.y, pa.x - new_hub_pos.x)
        step = 2.0 * math.pi / k_rim
        second = Point(
            new_hub_pos.x + rim_radius * math.cos(start + step),
            new_hub_pos.y + rim_radius * math.sin(start + step),
        )
        if math.hypot(second.x - pb.x, second.y - pb.y) > rim_radius * 1e-6:
            step = -step

        new_hub = len(positions)
        positions.append(new_hub_pos)
        new_rim = [a_id, b_id]
        for j in range(2, k_rim):
            ang = start + j * step
            positions.append(
                Point(new_hub_pos.x + rim_radius * math.cos(ang),
                      new_hub_pos.y + rim_radius * math.sin(ang))
            )
            new_rim.append(len(positions) - 1)
        # Ring order around the new rim is A, B, then the fresh nodes, but
        # the cycle edges must follow angular order: A->B->new_rim[2]->...
        ring = [a_id, b_id] + new_rim[2:]
        intended |= _wheel_edge_set(new_hub, ring)
        hub = new_hub
        rim_ids = ring
        inherited = (a_id, b_id)

    graph = udg_from_positions(positions, theta)
    if set(graph.deltas) != intended:
        return None
    return graph


# ---------------------------------------------------------------------------
# Serialization


def graph_doc(graph: WsnGraph) -> dict:
    """Plain-JSON form of a graph: theta, node positions, measured edges."""
    return {
        "theta": graph.theta,
        "nodes": [
            {"id": i, "x": p.x, "y": p.y} for i, p in enumerate(graph.positions)
        ],
        "edges": [
            {"u": u, "v": v, "delta": d} for (u, v), d in sorted(graph.deltas.items())
        ],
    }


def save_graph(graph: WsnGraph, path: str | Path) -> None:
    """Write a graph as JSON."""
    Path(path).write_text(json.dumps(graph_doc(graph), indent=1) + "\n")


def load_graph(path: str | Path) -> WsnGraph:
    """Read a graph file, validating structure and the unit-disk property.

    Rejects files whose edge set contradicts the stored positions and
    theta (an edge between nodes farther than theta apart, or a missing
    edge between nodes within range), naming the offending pair.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not valid JSON: {exc}") from exc

    try:
        theta = float(doc["theta"])
        raw_nodes = doc["nodes"]
        raw_edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"missing or malformed field: {exc}") from exc
    if not (math.isfinite(theta) and theta > 0):
        raise GraphFormatError(f"theta must be positive and finite, got {theta}")

    n = len(raw_nodes)
    positions: list[Point | None] = [None] * n
    for entry in raw_nodes:
        try:
            i, x, y = int(entry["id"]), float(entry["x"]), float(entry["y"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed node entry {entry!r}") from exc
        if not (0 <= i < n) or positions[i] is not None:
            raise GraphFormatError(f"node ids must be dense from 0; bad id {i}")
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GraphFormatError(f"node {i} has non-finite coordinates")
        positions[i] = Point(x, y)
    if n == 0:
        raise GraphFormatError("graph has no nodes")

    deltas: dict[tuple[int, int], float] = {}
    for entry in raw_edges:
        try:
            u, v, d = int(entry["u"]), int(entry["v"]), float(entry["delta"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed edge entry {entry!r}") from exc
        if not (0 <= u < v < n):
            raise GraphFormatError(f"edge ({u}, {v}) must satisfy 0 <= u < v < n")
        if (u, v) in deltas:
            raise GraphFormatError(f"duplicate edge ({u}, {v})")
        if not (math.isfinite(d) and d > 0):
            raise GraphFormatError(f"edge ({u}, {v}) has non-positive delta {d}")
        deltas[(u, v)] = d

    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(deltas):
        nbrs[u].append(v)
        nbrs[v].append(u)
    graph = WsnGraph(
        theta=theta,
        positions=tuple(positions),  # type: ignore[arg-type]
        deltas=dict(sorted(deltas.items())),
        neighbors=tuple(tuple(sorted(lst)) for lst in nbrs),
    )
    check_udg_property(graph)
    return graph

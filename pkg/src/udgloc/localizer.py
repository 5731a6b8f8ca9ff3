"""Incremental 2D localization with missing-edge pruning.

Placement propagates outward from a seed triangle: a node with two
localized neighbors has two mirror-image candidate positions, and a
candidate can be discarded if it lands inside the sensing range of some
localized node the target does not hear, because a true unit-disk
deployment could never produce that. With three localized neighbors the
third range is used as a tie-breaker band instead. The driver sweeps seed
triangles and keeps the largest formation.

Two modes: "violations" uses the pruning rule plus the range band;
"pure" is the classical trilateration baseline (range band only, nodes
need three localized neighbors).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .geometry import (
    CandidatePair,
    Point,
    are_collinear,
    circle_intersection,
    distance,
)
from .network import WsnGraph

#: Absolute slack (relative to the measured range) added to the range band
#: so noiseless runs survive floating-point jitter.
BAND_FLOAT_FLOOR = 1e-9

MODES = ("violations", "pure")
SEED_PLACEMENTS = ("anchored", "relative")


@dataclass(frozen=True)
class AlgorithmConfig:
    """Knobs for one localization run.

    ``p_tolerance`` is the error-magnitude percentage P: the range band
    accepts a candidate whose distance to the tie-break anchor is within
    d * P/100 of the measured range d. ``seed_triple_cap`` bounds how many
    seed triangles are attempted (None tries them all). ``strict_boundary``
    keeps the pruning comparison strict (a candidate exactly at theta from
    a non-neighbor is not a violation).
    """

    mode: str = "violations"
    p_tolerance: float = 0.0
    seed_placement: str = "anchored"
    seed_triple_cap: Optional[int] = None
    strict_boundary: bool = True
    collinear_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.seed_placement not in SEED_PLACEMENTS:
            raise ValueError(
                f"seed_placement must be one of {SEED_PLACEMENTS}, "
                f"got {self.seed_placement!r}"
            )
        if self.p_tolerance < 0:
            raise ValueError(f"p_tolerance must be >= 0, got {self.p_tolerance}")
        if self.seed_triple_cap is not None and self.seed_triple_cap < 1:
            raise ValueError("seed_triple_cap must be >= 1 or None")

    @property
    def violations_enabled(self) -> bool:
        return self.mode == "violations"


@dataclass
class PlacementRecord:
    """Audit entry for one placed node: enough to replay the decision."""

    node: int
    method: str  # "seed" | "bilaterate" | "trilaterate"
    position: Point
    anchors: tuple[int, ...] = ()
    candidates: Optional[tuple[Point, Point]] = None
    violations: Optional[tuple[bool, bool]] = None
    band_verdict: Optional[str] = None  # "p1" | "p2" when the band decided


class Formation:
    """Ordered node placements with their audit records."""

    def __init__(self) -> None:
        self.records: list[PlacementRecord] = []
        self._nodes: set[int] = set()

    def add(self, record: PlacementRecord) -> None:
        if record.node in self._nodes:
            raise ValueError(f"node {record.node} placed twice")
        self._nodes.add(record.node)
        self.records.append(record)

    @property
    def placements(self) -> list[tuple[int, Point]]:
        return [(r.node, r.position) for r in self.records]

    def positions(self) -> dict[int, Point]:
        return {r.node: r.position for r in self.records}

    def __contains__(self, node: int) -> bool:
        return node in self._nodes

    def __len__(self) -> int:
        return len(self.records)

    def __repr__(self) -> str:
        return f"Formation({len(self.records)} nodes)"


class LocalizationState:
    """Mutable working state for one seed attempt.

    Tracks estimated positions, each node's localized neighbors in the
    order they were localized (the tail is the most recent), and the FIFO
    propagation queue.
    """

    def __init__(self, graph: WsnGraph) -> None:
        self.graph = graph
        self.est = np.full((graph.n, 2), np.nan)
        self.localized = np.zeros(graph.n, dtype=bool)
        self.localized_neighbors: list[list[int]] = [[] for _ in range(graph.n)]
        self.queue: deque[int] = deque()
        self.formation = Formation()
        self._points: dict[int, Point] = {}

    def position(self, node: int) -> Point:
        return self._points[node]

    def ln_count(self, node: int) -> int:
        return len(self.localized_neighbors[node])

    def place(self, node: int, pos: Point, record: PlacementRecord) -> None:
        """Fix a node's position and notify its neighbors."""
        self.est[node, 0] = pos.x
        self.est[node, 1] = pos.y
        self.localized[node] = True
        self._points[node] = pos
        self.formation.add(record)
        for nb in self.graph.neighbors[node]:
            self.localized_neighbors[nb].append(node)


@dataclass(frozen=True)
class Placed:
    position: Point
    record: PlacementRecord

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Failed:
    reason: str  # "both-violate" | "both-clear" | "band-ambiguous" | "no-intersection"

    def __bool__(self) -> bool:
        return False


def choose_candidate(
    p1: Point, p2: Point, anchor: Point, measured: float, rel_tol: float
) -> Optional[Point]:
    """Pick between two candidates using a third range measurement.

    A candidate is acceptable when its distance to ``anchor`` is within
    ``measured * rel_tol`` of ``measured``. Returns the single acceptable
    candidate, or None when both or neither are acceptable (the position
    stays ambiguous either way).
    """
    if measured <= 0:
        raise ValueError(f"measured range must be positive, got {measured}")
    band = measured * rel_tol + BAND_FLOAT_FLOOR * max(measured, 1.0)
    in1 = abs(distance(anchor, p1) - measured) <= band
    in2 = abs(distance(anchor, p2) - measured) <= band
    if in1 and in2:
        return None
    if in1:
        return p1
    if in2:
        return p2
    return None


def check_violation(
    candidate: Point,
    state: LocalizationState,
    graph: WsnGraph,
    node: int,
    strict: bool = True,
) -> bool:
    """Whether placing ``node`` at ``candidate`` contradicts the disk graph.

    True when some already-localized node that is not a neighbor of
    ``node`` sits within sensing range of the candidate: in a true
    unit-disk deployment they would have heard each other.
    """
    mask = state.localized & ~graph.adjacency[node]
    mask[node] = False
    pts = state.est[mask]
    if pts.shape[0] == 0:
        return False
    dx = pts[:, 0] - candidate.x
    dy = pts[:, 1] - candidate.y
    d2 = dx * dx + dy * dy
    th2 = graph.theta * graph.theta
    hit = d2 < th2 if strict else d2 <= th2
    return bool(hit.any())


def bilaterate(
    node: int, state: LocalizationState, graph: WsnGraph, config: AlgorithmConfig
) -> Placed | Failed:
    """Place a node from two ranges, keeping the lone violation-free candidate.

    Uses the first and the most recently localized neighbor as anchors.
    Succeeds only when exactly one of the two mirror candidates is free of
    disk-graph violations; both-clear stays ambiguous and both-violating
    means the local geometry is inconsistent.
    """
    ln = state.localized_neighbors[node]
    if len(ln) < 2:
        raise ValueError(f"bilaterate needs 2 localized neighbors, node {node} has {len(ln)}")
    a1, a2 = ln[0], ln[-1]
    inter = circle_intersection(
        state.position(a1), graph.delta(node, a1),
        state.position(a2), graph.delta(node, a2),
    )
    if not isinstance(inter, CandidatePair):
        return Failed("no-intersection")
    v1 = check_violation(inter.p1, state, graph, node, config.strict_boundary)
    v2 = check_violation(inter.p2, state, graph, node, config.strict_boundary)
    if v1 and v2:
        return Failed("both-violate")
    if not v1 and not v2:
        return Failed("both-clear")
    pos = inter.p1 if not v1 else inter.p2
    record = PlacementRecord(
        node=node,
        method="bilaterate",
        position=pos,
        anchors=(a1, a2),
        candidates=(inter.p1, inter.p2),
        violations=(v1, v2),
    )
    state.place(node, pos, record)
    return Placed(pos, record)


def trilaterate(
    node: int, state: LocalizationState, graph: WsnGraph, config: AlgorithmConfig
) -> Placed | Failed:
    """Place a node from three ranges.

    Candidates come from the first two localized neighbors' circles. With
    violation pruning enabled, a lone violation-free candidate wins
    outright; when both are clear (or in pure mode, always) the third
    range decides via the acceptance band, failing on ambiguity.
    """
    ln = state.localized_neighbors[node]
    if len(ln) < 3:
        raise ValueError(f"trilaterate needs 3 localized neighbors, node {node} has {len(ln)}")
    a1, a2, last = ln[0], ln[1], ln[-1]
    inter = circle_intersection(
        state.position(a1), graph.delta(node, a1),
        state.position(a2), graph.delta(node, a2),
    )
    if not isinstance(inter, CandidatePair):
        return Failed("no-intersection")
    p1, p2 = inter.p1, inter.p2

    verdicts: Optional[tuple[bool, bool]] = None
    if config.violations_enabled:
        v1 = check_violation(p1, state, graph, node, config.strict_boundary)
        v2 = check_violation(p2, state, graph, node, config.strict_boundary)
        verdicts = (v1, v2)
        if v1 and v2:
            return Failed("both-violate")
        if v1 != v2:
            pos = p1 if not v1 else p2
            record = PlacementRecord(
                node=node,
                method="trilaterate",
                position=pos,
                anchors=(a1, a2, last),
                candidates=(p1, p2),
                violations=verdicts,
            )
            state.place(node, pos, record)
            return Placed(pos, record)

    choice = choose_candidate(
        p1, p2, state.position(last), graph.delta(node, last),
        config.p_tolerance / 100.0,
    )
    if choice is None:
        return Failed("band-ambiguous")
    record = PlacementRecord(
        node=node,
        method="trilaterate",
        position=choice,
        anchors=(a1, a2, last),
        candidates=(p1, p2),
        violations=verdicts,
        band_verdict="p1" if choice is p1 else "p2",
    )
    state.place(node, choice, record)
    return Placed(choice, record)


def _seed_triples(graph: WsnGraph) -> Iterator[tuple[int, int, int]]:
    """Pairwise-connected triples in lexicographic id order."""
    for a in range(graph.n):
        nbrs = [b for b in graph.neighbors[a] if b > a]
        for i, b in enumerate(nbrs):
            for c in nbrs[i + 1 :]:
                if graph.has_edge(b, c):
                    yield a, b, c


def _seed_positions(
    graph: WsnGraph, triple: tuple[int, int, int], config: AlgorithmConfig
) -> Optional[tuple[Point, Point, Point]]:
    """Coordinates for a seed triangle, or None if it is degenerate."""
    a, b, c = triple
    if config.seed_placement == "anchored":
        pa, pb, pc = graph.positions[a], graph.positions[b], graph.positions[c]
        if are_collinear(pa, pb, pc, config.collinear_tol):
            return None
        return pa, pb, pc
    # Relative frame: a at the origin, b on +x, c in the upper half-plane,
    # all reconstructed from the measured ranges alone.
    dab = graph.delta(a, b)
    dac = graph.delta(a, c)
    dbc = graph.delta(b, c)
    cx = (dac * dac - dbc * dbc + dab * dab) / (2.0 * dab)
    h2 = dac * dac - cx * cx
    if h2 <= 0.0:
        return None  # measured triangle is flat or impossible
    pa, pb, pc = Point(0.0, 0.0), Point(dab, 0.0), Point(cx, math.sqrt(h2))
    if are_collinear(pa, pb, pc, config.collinear_tol):
        return None
    return pa, pb, pc


def _propagate(
    state: LocalizationState, graph: WsnGraph, config: AlgorithmConfig
) -> None:
    """Breadth-first placement from the seeded queue until it drains."""
    queue = state.queue
    fallback = config.violations_enabled
    while queue:
        i = queue.popleft()
        for j in graph.neighbors[i]:
            if state.localized[j]:
                continue
            lnc = len(state.localized_neighbors[j])
            if lnc >= 3:
                result = trilaterate(j, state, graph, config)
                if not result and fallback:
                    result = bilaterate(j, state, graph, config)
            elif lnc == 2 and fallback:
                result = bilaterate(j, state, graph, config)
            else:
                continue
            if result:
                queue.append(j)


def localize_graph(graph: WsnGraph, config: AlgorithmConfig = AlgorithmConfig()) -> Formation:
    """Localize as much of a graph as possible; returns the best formation.

    Sweeps non-collinear, pairwise-connected seed triangles in
    lexicographic order, propagating placements breadth-first from each.
    Returns immediately when some attempt localizes every node, otherwise
    the largest formation found (empty when no valid seed exists).
    Deterministic for a fixed graph and config.
    """
    if graph.n < 3:
        raise ValueError(f"localization needs at least 3 nodes, got {graph.n}")
    best = Formation()
    attempts = 0
    for triple in _seed_triples(graph):
        if config.seed_triple_cap is not None and attempts >= config.seed_triple_cap:
            break
        seeds = _seed_positions(graph, triple, config)
        if seeds is None:
            continue
        attempts += 1
        state = LocalizationState(graph)
        for node, pos in zip(triple, seeds):
            state.place(node, pos, PlacementRecord(node=node, method="seed", position=pos))
            state.queue.append(node)
        _propagate(state, graph, config)
        if len(state.formation) == graph.n:
            return state.formation
        if len(state.formation) > len(best):
            best = state.formation
    return best


# ---------------------------------------------------------------------------
# Audit replay and serialization


def verify_placement_soundness(formation: Formation, graph: WsnGraph) -> None:
    """Replay an audit log, re-checking the pruning guarantee.

    Every node placed by bilateration or trilateration must sit at least
    theta away from all nodes localized before it that are not its graph
    neighbors (same squared-distance comparison as the live check).
    Raises ValueError on the first contradiction.
    """
    th2 = graph.theta * graph.theta
    placed: list[tuple[int, Point]] = []
    for rec in formation.records:
        if rec.method != "seed":
            for earlier, pos in placed:
                if earlier == rec.node or graph.has_edge(earlier, rec.node):
                    continue
                dx = pos.x - rec.position.x
                dy = pos.y - rec.position.y
                if dx * dx + dy * dy < th2:
                    raise ValueError(
                        f"placement of node {rec.node} sits within theta of "
                        f"non-neighbor {earlier} localized earlier"
                    )
        placed.append((rec.node, rec.position))


def formation_doc(formation: Formation, graph: WsnGraph) -> dict:
    """Plain-JSON form of a formation: placements plus overall recall."""
    return {
        "localized": [
            {"id": r.node, "x": r.position.x, "y": r.position.y, "method": r.method}
            for r in formation.records
        ],
        "recall_pct": 100.0 * len(formation) / graph.n,
    }


def save_formation(formation: Formation, graph: WsnGraph, path: str | Path) -> None:
    """Write a formation as JSON with per-node method and overall recall."""
    Path(path).write_text(json.dumps(formation_doc(formation, graph), indent=1) + "\n")


def write_audit_log(formation: Formation, path: str | Path) -> None:
    """Write one JSON line per placement record."""
    lines = []
    for r in formation.records:
        lines.append(json.dumps({
            "node": r.node,
            "method": r.method,
            "position": [r.position.x, r.position.y],
            "anchors": list(r.anchors),
            "candidates": (
                [[p.x, p.y] for p in r.candidates] if r.candidates else None
            ),
            "violations": list(r.violations) if r.violations is not None else None,
            "band_verdict": r.band_verdict,
        }))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))

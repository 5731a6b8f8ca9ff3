"""Recall and position-offset metrics for localization runs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .localizer import Formation
from .network import WsnGraph


@dataclass(frozen=True)
class TrialResult:
    """One row of a sweep: parameters in, recall and offset out."""

    n: int
    avg_degree: float
    p_magnitude: float
    mode: str
    recall_pct: float
    mean_offset: Optional[float]  # None when nothing was localized
    trial: int
    rng_seed: int


def recall(formation: Formation, graph: WsnGraph) -> float:
    """Percentage of the graph's nodes that received a position."""
    return 100.0 * len(formation) / graph.n


def mean_offset(formation: Formation, graph: WsnGraph, align: str = "none") -> float:
    """Mean distance between estimated and true positions, in meters.

    Averaged over localized nodes only. With ``align="rigid"`` the
    estimates are first mapped onto the truth by the rotation (reflection
    allowed) and translation minimizing the squared residuals, which is the
    right comparison for formations built in a relative coordinate frame.
    """
    if align not in ("none", "rigid"):
        raise ValueError(f"align must be 'none' or 'rigid', got {align!r}")
    if len(formation) == 0:
        raise ValueError("mean_offset needs at least one localized node")
    nodes = [r.node for r in formation.records]
    est = np.array([[r.position.x, r.position.y] for r in formation.records])
    true = graph.pos_array[nodes]
    if align == "rigid":
        if len(nodes) < 2:
            raise ValueError("rigid alignment needs at least 2 localized nodes")
        est = _rigid_align(est, true)
    return float(np.mean(np.hypot(*(est - true).T)))


def _rigid_align(est: np.ndarray, true: np.ndarray) -> np.ndarray:
    """Best-fit rotation/reflection plus translation of est onto true."""
    est_mean = est.mean(axis=0)
    true_mean = true.mean(axis=0)
    est_c = est - est_mean
    true_c = true - true_mean
    if not np.any(np.abs(est_c) > 0.0):
        return est + (true_mean - est_mean)  # coincident estimates: shift only
    u, _, vt = np.linalg.svd(est_c.T @ true_c)
    rot = u @ vt
    return est_c @ rot + true_mean

"""Range-based 2D sensor-network localization with unit-disk pruning.

The package localizes wireless sensor networks from pairwise range
measurements. Beyond classical trilateration, positions can be fixed from
only two ranges by discarding the mirror candidate that would sit inside
the sensing range of a node the target cannot hear, which is impossible
in a unit-disk deployment.
"""

from .geometry import (
    INFINITE_INTERSECTION,
    NO_INTERSECTION,
    CandidatePair,
    Point,
    are_collinear,
    circle_intersection,
    distance,
)
from .harness import (
    ExperimentConfig,
    run_sweep_degree,
    run_sweep_noise,
    run_wheel_demo,
    summarize,
)
from .localizer import (
    AlgorithmConfig,
    Failed,
    Formation,
    LocalizationState,
    Placed,
    PlacementRecord,
    bilaterate,
    check_violation,
    choose_candidate,
    formation_doc,
    localize_graph,
    save_formation,
    trilaterate,
    verify_placement_soundness,
    write_audit_log,
)
from .metrics import TrialResult, mean_offset, recall
from .network import (
    GenerationError,
    GraphFormatError,
    NoiseModel,
    WheelGeometryError,
    WsnGraph,
    apply_noise,
    chain_rim_radius,
    check_udg_property,
    default_rim_radius,
    generate_random_udg,
    generate_wheel,
    generate_wheel_network,
    graph_doc,
    load_graph,
    ranging_bias,
    save_graph,
    udg_from_positions,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "CandidatePair",
    "ExperimentConfig",
    "Failed",
    "Formation",
    "GenerationError",
    "GraphFormatError",
    "INFINITE_INTERSECTION",
    "LocalizationState",
    "NO_INTERSECTION",
    "NoiseModel",
    "Placed",
    "PlacementRecord",
    "Point",
    "TrialResult",
    "WheelGeometryError",
    "WsnGraph",
    "apply_noise",
    "are_collinear",
    "bilaterate",
    "chain_rim_radius",
    "check_udg_property",
    "check_violation",
    "choose_candidate",
    "circle_intersection",
    "default_rim_radius",
    "distance",
    "formation_doc",
    "generate_random_udg",
    "generate_wheel",
    "generate_wheel_network",
    "graph_doc",
    "load_graph",
    "localize_graph",
    "mean_offset",
    "ranging_bias",
    "recall",
    "run_sweep_degree",
    "run_sweep_noise",
    "run_wheel_demo",
    "save_formation",
    "save_graph",
    "summarize",
    "trilaterate",
    "udg_from_positions",
    "verify_placement_soundness",
    "write_audit_log",
]

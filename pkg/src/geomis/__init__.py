"""geomis: online maximum-independent-set algorithms on geometric
intersection graphs, with exact offline oracles and a seeded
experiment harness."""

from .geometry import (
    Ball,
    HyperRectangle,
    Point,
    SizedObject,
    UsageError,
    balls_intersect,
    distance,
    intersection_graph,
    objects_intersect,
    rects_intersect,
)
from .lattice import (
    CoeffVector,
    LatticeParams,
    SampleBox,
    closest_lattice_point,
    coverage_cells,
    is_covered,
    lattice_point,
    mc_volume_fraction,
    min_pairwise_distance,
    parity_rounded_point,
    unit_ball_volume,
)
from .online import (
    AcceptAll,
    ArrivalEvent,
    ArrivalSequence,
    FirstFit,
    RejectAll,
    RunResult,
    empirical_ratio,
    finalize_run,
    first_fit,
    run_online,
)
from .algorithms import (
    Classify,
    HRClassify,
    LatticeFilter,
    class_count,
    classify_alg,
    filter_accept_counts,
    filter_acceptance_probability,
    filter_alg,
    hr_classify_alg,
    width_class_index,
)
from .adversaries import (
    AdversaryConfig,
    StarOutcome,
    generate_instance,
    level_graph_gen,
    random_balls_gen,
    random_rects_gen,
    star_adversary,
)
from .oracle import (
    DEFAULT_NODE_LIMIT,
    IknResult,
    MisResult,
    OracleRefusal,
    RatioReport,
    exact_mis,
    independent_kissing_number,
    verify_ratio,
)
from .instances import InstanceFormatError, load_instance, save_instance, save_transcript
from .harness import (
    ExperimentConfig,
    ExperimentSummary,
    TrialRecord,
    derive_seed,
    render_csv,
    run_experiment,
    summarize,
    write_csv,
)
from .cli import cli_dispatch

__version__ = "0.1.0"

__all__ = [
    "AcceptAll",
    "AdversaryConfig",
    "ArrivalEvent",
    "ArrivalSequence",
    "Ball",
    "Classify",
    "CoeffVector",
    "DEFAULT_NODE_LIMIT",
    "ExperimentConfig",
    "ExperimentSummary",
    "FirstFit",
    "HRClassify",
    "HyperRectangle",
    "IknResult",
    "InstanceFormatError",
    "LatticeFilter",
    "LatticeParams",
    "MisResult",
    "OracleRefusal",
    "Point",
    "RatioReport",
    "RejectAll",
    "RunResult",
    "SampleBox",
    "SizedObject",
    "StarOutcome",
    "TrialRecord",
    "UsageError",
    "balls_intersect",
    "class_count",
    "classify_alg",
    "cli_dispatch",
    "closest_lattice_point",
    "coverage_cells",
    "derive_seed",
    "distance",
    "empirical_ratio",
    "exact_mis",
    "filter_accept_counts",
    "filter_acceptance_probability",
    "filter_alg",
    "finalize_run",
    "first_fit",
    "generate_instance",
    "hr_classify_alg",
    "independent_kissing_number",
    "intersection_graph",
    "is_covered",
    "lattice_point",
    "level_graph_gen",
    "load_instance",
    "mc_volume_fraction",
    "min_pairwise_distance",
    "objects_intersect",
    "parity_rounded_point",
    "random_balls_gen",
    "random_rects_gen",
    "rects_intersect",
    "render_csv",
    "run_experiment",
    "run_online",
    "save_instance",
    "save_transcript",
    "star_adversary",
    "summarize",
    "unit_ball_volume",
    "verify_ratio",
    "width_class_index",
    "write_csv",
]

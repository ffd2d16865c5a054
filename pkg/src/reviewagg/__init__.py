"""Community consensus mapping from per-criterion review scores to overall recommendations."""

from .axioms import (
    AxiomInstance,
    AxiomVerdict,
    LpqAggregationMethod,
    check_consensus,
    check_efficiency,
    check_strategyproofness,
    default_manipulations,
    efficiency_limit_minimizer,
    efficiency_limit_objective,
    lpq_method,
    make_consensus_instance,
    make_fermat_instance,
    make_sp_instance,
)
from .dataset import (
    Dataset,
    DatasetError,
    ParseError,
    ReviewRecord,
    SettingFlags,
    ValidationError,
    classify_setting,
    ingest_csv,
    marginal_modes,
    write_csv,
)
from .estimator import LpqAggregator
from .loss import INF, LpqConfig, lpq_loss, per_reviewer_normalized_loss
from .order import DominanceGraph, build_dominance_graph, sorted_dominates, to_dot
from .pipeline import (
    OverlapMatrix,
    PaperScore,
    SelectionResult,
    SubsampleRow,
    aggregate_papers,
    overlap,
    pq_overlap_matrix,
    select_top,
    slice_grid,
    subsample_experiment,
)
from .solver import (
    FEAS_TOL,
    AggregateFunction,
    ExtensionRule,
    SolveReport,
    brute_force_solve,
    evaluate,
    left_median,
    solve,
    solve_l11_closed_form,
)
from .synth import generate_dataset

__version__ = "0.1.0"

__all__ = [
    "AggregateFunction",
    "AxiomInstance",
    "AxiomVerdict",
    "Dataset",
    "DatasetError",
    "DominanceGraph",
    "ExtensionRule",
    "FEAS_TOL",
    "INF",
    "LpqAggregationMethod",
    "LpqAggregator",
    "LpqConfig",
    "OverlapMatrix",
    "PaperScore",
    "ParseError",
    "ReviewRecord",
    "SelectionResult",
    "SettingFlags",
    "SolveReport",
    "SubsampleRow",
    "ValidationError",
    "aggregate_papers",
    "brute_force_solve",
    "build_dominance_graph",
    "check_consensus",
    "check_efficiency",
    "check_strategyproofness",
    "classify_setting",
    "default_manipulations",
    "efficiency_limit_minimizer",
    "efficiency_limit_objective",
    "evaluate",
    "generate_dataset",
    "ingest_csv",
    "left_median",
    "lpq_loss",
    "lpq_method",
    "make_consensus_instance",
    "make_fermat_instance",
    "make_sp_instance",
    "marginal_modes",
    "overlap",
    "per_reviewer_normalized_loss",
    "pq_overlap_matrix",
    "select_top",
    "slice_grid",
    "solve",
    "solve_l11_closed_form",
    "sorted_dominates",
    "subsample_experiment",
    "to_dot",
    "write_csv",
]

"""Sublinear approximate single-source personalized PageRank.

Estimator classes (:class:`AbsoluteErrorPPR`, :class:`DegreeNormalizedPPR`,
:class:`ExactPPR`, :class:`MonteCarloPPR`) are the high-level entry point;
the functional modules underneath expose the graph container, the exact
oracle, discounted random walks, backward/forward push, and the
guarantee-carrying query engines plus their verification harness.
"""
from .estimators import AbsoluteErrorPPR, DegreeNormalizedPPR, ExactPPR, MonteCarloPPR
from .exact import DenseScores, exact_ssppr, exact_stppr, powerlaw_fit_diagnostic
from .graphs import (
    AliasTable,
    EdgeListFormatError,
    Graph,
    GraphError,
    GraphValidationError,
    generate_power_law,
    load_edge_list,
    read_graph,
    read_id_map,
    write_graph,
    write_id_map,
)
from .harness import (
    ScaleCell,
    ScaleReport,
    VerifyReport,
    powerlaw_family,
    scale_experiment,
    verify_guarantee,
)
from .push import (
    Budget,
    BudgetExceeded,
    ForwardPushResult,
    PushResult,
    backward_push,
    forward_push,
    verify_invariant,
    write_push_result,
)
from .queries import (
    AdaptivePushOutcome,
    QueryAnswer,
    QueryDiagnostics,
    QueryParams,
    adaptive_backward_push,
    combine_estimate,
    median_trick_apply,
    rbs_estimate,
    ssppr_a,
    ssppr_d,
    write_answer,
)
from .walks import (
    SparseEstimate,
    WalkEngine,
    chernoff_bound,
    lower_median,
    monte_carlo,
    monte_carlo_from_distribution,
    phase1_walk_count,
    simulate_walk,
    trial_count,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteErrorPPR",
    "DegreeNormalizedPPR",
    "ExactPPR",
    "MonteCarloPPR",
    "DenseScores",
    "exact_ssppr",
    "exact_stppr",
    "powerlaw_fit_diagnostic",
    "AliasTable",
    "EdgeListFormatError",
    "Graph",
    "GraphError",
    "GraphValidationError",
    "generate_power_law",
    "load_edge_list",
    "read_graph",
    "read_id_map",
    "write_graph",
    "write_id_map",
    "ScaleCell",
    "ScaleReport",
    "VerifyReport",
    "powerlaw_family",
    "scale_experiment",
    "verify_guarantee",
    "Budget",
    "BudgetExceeded",
    "ForwardPushResult",
    "PushResult",
    "backward_push",
    "forward_push",
    "verify_invariant",
    "write_push_result",
    "AdaptivePushOutcome",
    "QueryAnswer",
    "QueryDiagnostics",
    "QueryParams",
    "adaptive_backward_push",
    "combine_estimate",
    "median_trick_apply",
    "rbs_estimate",
    "ssppr_a",
    "ssppr_d",
    "write_answer",
    "SparseEstimate",
    "WalkEngine",
    "chernoff_bound",
    "lower_median",
    "monte_carlo",
    "monte_carlo_from_distribution",
    "phase1_walk_count",
    "simulate_walk",
    "trial_count",
    "__version__",
]

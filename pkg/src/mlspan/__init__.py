"""Multi-level graph spanners.

Approximation algorithms, exact solvers, and flow-based integer program
builders for spanners with graded edge requirements, plus seeded random
instance generation and an experiment harness.
"""

__version__ = "0.1.0"

from .exact import (
    BRUTE_FORCE_CAP,
    DEFAULT_NODE_LIMIT,
    ExactBudgetError,
    ExactResult,
    brute_force_oracle,
    solve_exact,
    solve_pairwise,
    solve_subsetwise,
)
from .generate import (
    GeneratorSpec,
    build_instance,
    er_edge_probability,
    erdos_renyi,
    sample_nested_terminals,
    watts_strogatz,
)
from .graph import (
    EPS,
    INF,
    DisconnectedPairError,
    Path,
    StretchViolation,
    WeightedGraph,
    all_pairs_distances,
    connected_over,
    normalize_pair,
    shortest_path,
    single_source_distances,
    stretch_violations,
)
from .ilp import (
    DirectedArcs,
    Fixings,
    IlpConstraint,
    IlpModel,
    IlpVariable,
    build_mlgs_model,
    build_pairwise_model,
    emit_lp_text,
    reduce_instance,
)
from .instance_io import (
    InstanceFormatError,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from .multilevel import (
    GradedSubgraph,
    LevelViolation,
    MLGSInstance,
    bottom_up,
    combined,
    solution_cost,
    top_down,
    validate_mlgs,
)
from .experiment import (
    ExperimentConfig,
    ExperimentRecord,
    instance_seed,
    parse_config,
    run_suite,
    theorem_bound,
)
from .spanners import (
    greedy_spanner,
    path_union_preserver,
    subsetwise_spanner,
    terminal_complete_graph,
)

__all__ = [
    "BRUTE_FORCE_CAP",
    "DEFAULT_NODE_LIMIT",
    "DirectedArcs",
    "DisconnectedPairError",
    "EPS",
    "ExactBudgetError",
    "ExactResult",
    "ExperimentConfig",
    "ExperimentRecord",
    "Fixings",
    "GeneratorSpec",
    "GradedSubgraph",
    "INF",
    "IlpConstraint",
    "IlpModel",
    "IlpVariable",
    "InstanceFormatError",
    "LevelViolation",
    "MLGSInstance",
    "Path",
    "StretchViolation",
    "WeightedGraph",
    "all_pairs_distances",
    "bottom_up",
    "brute_force_oracle",
    "build_instance",
    "build_mlgs_model",
    "build_pairwise_model",
    "combined",
    "connected_over",
    "emit_lp_text",
    "er_edge_probability",
    "erdos_renyi",
    "greedy_spanner",
    "instance_seed",
    "normalize_pair",
    "parse_config",
    "parse_instance",
    "parse_solution",
    "path_union_preserver",
    "reduce_instance",
    "run_suite",
    "sample_nested_terminals",
    "serialize_instance",
    "serialize_solution",
    "shortest_path",
    "single_source_distances",
    "solution_cost",
    "solve_exact",
    "solve_pairwise",
    "solve_subsetwise",
    "stretch_violations",
    "subsetwise_spanner",
    "terminal_complete_graph",
    "theorem_bound",
    "top_down",
    "validate_mlgs",
    "watts_strogatz",
]

"""Causal structure search with a rank-Gaussianizing transform.

Graph machinery (DAGs, patterns, Meek rules, d-separation), the
nonparanormal column transform, structural-equation simulators, the PC and
GES searches plus their hybrid, accuracy metrics, and a benchmark harness.
"""

from . import errors
from .bench import (
    AlgorithmSpec,
    ConditionResult,
    ExperimentSpec,
    algorithm_from_name,
    derive_seed,
    parse_table_csv,
    render_table,
    run_condition,
    table_spec,
)
from .gauss import (
    CovarianceSummary,
    ScoreConfig,
    covariance,
    fisher_z_independent,
    local_score,
    partial_correlation,
)
from .ges import GesConfig, ges_search, pc_ges_search
from .graph import (
    ARROW,
    TAIL,
    Dag,
    PartialGraph,
    PatternGraph,
    apply_meek_rules,
    d_separated,
    dag_from_text,
    dag_to_cpdag,
    graph_to_text,
    pattern_from_text,
    pdag_to_dag,
    random_dag,
)
from .metrics import MetricsReport, aggregate, compute_metrics
from .npn import normal_quantile, npn_transform, truncation_delta
from .pc import PcConfig, SepsetMap, pc_adjacencies, pc_search, pc_search_with_test
from .semsim import (
    CONNECTION_KINDS,
    DISTURBANCE_KINDS,
    SemModel,
    dataset_from_text,
    dataset_to_text,
    parameterize,
    sample_disturbance,
    sample_disturbances,
    simulate,
)

__all__ = [
    "ARROW",
    "TAIL",
    "AlgorithmSpec",
    "ConditionResult",
    "CovarianceSummary",
    "CONNECTION_KINDS",
    "DISTURBANCE_KINDS",
    "Dag",
    "ExperimentSpec",
    "GesConfig",
    "MetricsReport",
    "PartialGraph",
    "PatternGraph",
    "PcConfig",
    "ScoreConfig",
    "SemModel",
    "SepsetMap",
    "aggregate",
    "algorithm_from_name",
    "apply_meek_rules",
    "compute_metrics",
    "covariance",
    "d_separated",
    "dag_from_text",
    "dag_to_cpdag",
    "dataset_from_text",
    "dataset_to_text",
    "derive_seed",
    "errors",
    "fisher_z_independent",
    "ges_search",
    "graph_to_text",
    "local_score",
    "normal_quantile",
    "npn_transform",
    "parameterize",
    "parse_table_csv",
    "partial_correlation",
    "pattern_from_text",
    "pc_adjacencies",
    "pc_ges_search",
    "pc_search",
    "pc_search_with_test",
    "pdag_to_dag",
    "random_dag",
    "render_table",
    "run_condition",
    "sample_disturbance",
    "sample_disturbances",
    "simulate",
    "table_spec",
    "truncation_delta",
]

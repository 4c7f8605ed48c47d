"""Hopcount experiments on configuration models with heavy-tailed degrees.

The package builds random multigraphs by uniform stub matching, with i.i.d.
power-law degrees whose exponent sits in (1, 2) so the mean is infinite,
and measures graph distances, extreme-value statistics of the top degrees,
and the structural events that force ultra-short paths.  See the README for
the experiment walkthrough and the CLI entry points.
"""

from .degree_model import (
    DEFAULT_DEGREE_CAP,
    DegreeLaw,
    DegreeSequence,
    conditioned_pmf,
    max_degree_scale,
    sample_degree,
    sample_degree_conditioned,
    sample_sequence,
    tail,
    tail_quantile,
)
from .diagnostics import (
    EventFlags,
    OrderStats,
    beta_exponent,
    event_flags,
    giant_mass_fraction,
    giants_beta,
    giants_topk,
    order_stats,
)
from .distance import DEFAULT_CUTOFF, Hopcount, bidirectional_hopcount, hopcount
from .exact import (
    MAX_ORACLE_STUBS,
    double_factorial,
    enumerate_matchings,
    exact_hopcount_pmf,
    matching_census,
)
from .limit_laws import (
    MAX_JOINT_RANKS,
    order_ratio_cdf,
    order_ratio_cdf_by_rank,
    order_ratio_joint_cdf,
)
from .matching import DEFAULT_STUB_CAP, Matching, StubCapError, build_eager, build_lazy
from .montecarlo import (
    ConfigError,
    ExperimentConfig,
    ReplicaOutcome,
    SizeSummary,
    SummaryTable,
    bucket_labels,
    compare_conditioned,
    estimate_p,
    replica_rng,
    run_experiment,
    run_replica,
    summarize,
    write_histogram_tsvs,
    write_replica_csv,
    write_summary_json,
)
from .stats import ks_distance, ks_distance_two_sample, total_variation, wilson_interval

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CUTOFF",
    "DEFAULT_DEGREE_CAP",
    "DEFAULT_STUB_CAP",
    "MAX_JOINT_RANKS",
    "MAX_ORACLE_STUBS",
    "ConfigError",
    "DegreeLaw",
    "DegreeSequence",
    "EventFlags",
    "ExperimentConfig",
    "Hopcount",
    "Matching",
    "OrderStats",
    "ReplicaOutcome",
    "SizeSummary",
    "StubCapError",
    "SummaryTable",
    "beta_exponent",
    "bidirectional_hopcount",
    "bucket_labels",
    "build_eager",
    "build_lazy",
    "compare_conditioned",
    "conditioned_pmf",
    "double_factorial",
    "enumerate_matchings",
    "estimate_p",
    "event_flags",
    "exact_hopcount_pmf",
    "giant_mass_fraction",
    "giants_beta",
    "giants_topk",
    "hopcount",
    "ks_distance",
    "ks_distance_two_sample",
    "matching_census",
    "max_degree_scale",
    "order_ratio_cdf",
    "order_ratio_cdf_by_rank",
    "order_ratio_joint_cdf",
    "order_stats",
    "replica_rng",
    "run_experiment",
    "run_replica",
    "sample_degree",
    "sample_degree_conditioned",
    "sample_sequence",
    "summarize",
    "tail",
    "tail_quantile",
    "total_variation",
    "wilson_interval",
    "write_histogram_tsvs",
    "write_replica_csv",
    "write_summary_json",
]

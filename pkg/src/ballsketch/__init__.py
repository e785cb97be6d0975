"""Locate highly connected clusters in large graphs with mergeable sketches.

The pipeline: build one HyperLogLog counter per node, seed it with the
node's local items (itself, incident edges, triangles, wedges), then
propagate counters outward by register union so that after r rounds each
counter sketches the radius-r ball. Ratios of the resulting cardinality
estimates give per-node conductance and transitivity scores with analytic
error intervals; the best-scoring nodes make good seed sets for local
community detection with approximate personalized PageRank.
"""

from .errors import (
    BallsketchError,
    ConfigurationError,
    InputError,
    PreconditionError,
    UndefinedValueError,
)
from .sketch import HllConfig, HllCounter, alpha, estimate_sizes
from .graph import (
    Graph,
    PlantedPartitionParams,
    generate_planted_partition,
    load_edgelist,
    save_edgelist,
)
from .hyperball import (
    BallCardinality,
    BallKind,
    BallRun,
    count_ball,
    init_counters,
    load_counters,
    run,
    save_counters,
)
from .estimators import (
    ConfidenceInterval,
    beta,
    eta,
    chebyshev_conductance_interval,
    chebyshev_transitivity_interval,
    chebyshev_triangle_interval,
    dip_statistic,
    dip_test,
    estimate_conductance,
    estimate_transitivity,
    vp_conductance_interval,
    vp_transitivity_interval,
    vp_triangle_interval,
)
from .scoring import ClusterScorer, ClusterScores, compute_cluster_scores
from .community import (
    PageRankNibble,
    PprConfig,
    PprResult,
    SeedCriterion,
    SweepResult,
    approximate_pagerank,
    evaluate_seed_sets,
    pagerank_nibble,
    select_seeds,
    sweep_cut,
)
from . import oracle

__version__ = "0.1.0"

__all__ = [
    "BallsketchError",
    "ConfigurationError",
    "InputError",
    "PreconditionError",
    "UndefinedValueError",
    "HllConfig",
    "HllCounter",
    "alpha",
    "estimate_sizes",
    "Graph",
    "PlantedPartitionParams",
    "generate_planted_partition",
    "load_edgelist",
    "save_edgelist",
    "BallCardinality",
    "BallKind",
    "BallRun",
    "count_ball",
    "init_counters",
    "run",
    "save_counters",
    "load_counters",
    "ConfidenceInterval",
    "beta",
    "eta",
    "estimate_conductance",
    "estimate_transitivity",
    "chebyshev_conductance_interval",
    "vp_conductance_interval",
    "chebyshev_transitivity_interval",
    "vp_transitivity_interval",
    "chebyshev_triangle_interval",
    "vp_triangle_interval",
    "dip_statistic",
    "dip_test",
    "ClusterScores",
    "ClusterScorer",
    "compute_cluster_scores",
    "SeedCriterion",
    "PprConfig",
    "PprResult",
    "SweepResult",
    "approximate_pagerank",
    "sweep_cut",
    "pagerank_nibble",
    "select_seeds",
    "evaluate_seed_sets",
    "PageRankNibble",
    "oracle",
    "__version__",
]

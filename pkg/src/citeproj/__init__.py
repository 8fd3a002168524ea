"""Citation projection graphs: extraction, structural metrics, null models and impact statistics."""

from citeproj.graph import (
    CitationGraph,
    CycleReport,
    ParseError,
    PaperMeta,
    eligible_focal_papers,
    load_citation_graph,
    validate_acyclicity,
)
from citeproj.impact import (
    ImpactRecord,
    StrataConfig,
    citation_counts,
    median_metric_by_impact,
    normalized_impact,
    stratify,
)
from citeproj.metrics import MetricVector, metric_vector
from citeproj.nullmodel import (
    ComparisonReport,
    RandomizedGraph,
    compare_real_vs_random,
    randomize_degree_preserving,
)
from citeproj.projection import ProjectionPair, project
from citeproj.stats import (
    Histogram,
    TTestResult,
    group_means_table,
    normalized_histogram,
    temporal_split,
    welch_t_test,
)
from citeproj.synth import PrototypeSpec, generate_corpus, generate_prototype

__version__ = "0.1.0"

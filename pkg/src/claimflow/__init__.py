"""Claim-graph construction and longitudinal analytics for scientific
citation corpora.

The pipeline: load an annotated corpus bundle, merge near-duplicate
claims within each paper, build a typed claim-to-claim citation graph,
then run longitudinal metrics (reuse survival, challenge dynamics,
influence, density, community structure) or evaluate relation-label
predictions against gold annotations.
"""

from .analytics import (
    ChallengeRecord,
    ChallengeResult,
    InfluenceRecord,
    InfluenceResult,
    ModularityResult,
    PropagationResult,
    RelationDistribution,
    age_rank,
    challenge_analysis,
    convergence_divergence,
    convergence_scores,
    corpus_uncertainty_curve,
    cumulative_uncertainty,
    edge_density,
    influence_records,
    modularity,
    norm_influence,
    propagation_counts,
    relation_distribution,
    time_to_first_reuse,
    venue_relation_distribution,
)
from .canonicalize import (
    DEFAULT_TAU,
    CanonicalizationResult,
    ClusterMapping,
    EmbeddingTable,
    canonicalize_corpus,
    cluster_claims,
    cosine_similarity,
    load_embeddings,
    load_mapping,
    redirect_edges,
    save_embeddings,
    save_mapping,
    select_representative,
)
from .claim_graph import (
    ClaimGraph,
    GraphEdge,
    GraphNode,
    PaperInfo,
    all_degrees,
    build_graph,
    degrees,
    graph_fingerprint,
    load_graph,
    save_graph,
    serialize_graph,
    snapshot_at,
)
from .corpus import (
    LABELS,
    CitationContext,
    Claim,
    Corpus,
    Paper,
    RelationEdge,
    RestrictionResult,
    ValidationReport,
    Violation,
    corpus_fingerprint,
    drop_violating_records,
    load_corpus,
    restrict_citations,
    save_corpus,
    serialize_corpus,
    validate_corpus,
)
from .errors import (
    ClaimflowError,
    CorpusLoadError,
    KeyMismatchError,
    MissingEmbeddingError,
)
from .evaluation import (
    DEFAULT_RATIOS,
    SPLITS,
    EvalResult,
    LabelScores,
    PredRecord,
    SplitAssignment,
    edge_keys,
    load_labeled_edges,
    load_predictions,
    load_split,
    macro_prf,
    majority_baseline,
    save_labeled_edges,
    save_predictions,
    save_split,
    split_edges,
    stratified_split,
)
from .reports import METRIC_NAMES, MetricReport, build_report
from .stats import (
    SurvivalCurve,
    SurvivalInput,
    average_ranks,
    kaplan_meier,
    spearman,
)

__version__ = "0.1.0"

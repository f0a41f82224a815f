"""uiot: app-to-app retrieval and design-consistency scoring for
screenshot embedding sets.

Apps are treated as discrete distributions over unit-norm screenshot
embeddings. Distances between apps come from exact or entropic optimal
transport over the pairwise cosine cost; in-app consistency comes from
the hyperspherical uniformity loss.
"""

__version__ = "0.1.0"

from .dataset import Dataset, ScreenSet, ingest, make_screen_set
from .errors import UiotError
from .geometry import cosine_distance, normalize, normalize_rows, pairwise_cost
from .retrieval import (
    LabelEmbeddingSet,
    build_label_embeddings,
    classification_accuracy,
    classify,
    default_templates,
    nearest_screenshots,
    rank_apps,
)
from .stats import mann_whitney_u, welch_ttest
from .transport import (
    OtResult,
    PlanCache,
    SolverConfig,
    TransportPlan,
    app_distance,
    solve_exact,
    solve_sinkhorn,
    uniform_marginal,
)
from .uniformity import WhatIfEdit, delta_uniformity, uniformity_loss

__all__ = [
    "Dataset",
    "LabelEmbeddingSet",
    "OtResult",
    "PlanCache",
    "ScreenSet",
    "SolverConfig",
    "TransportPlan",
    "UiotError",
    "WhatIfEdit",
    "app_distance",
    "build_label_embeddings",
    "classification_accuracy",
    "classify",
    "cosine_distance",
    "default_templates",
    "delta_uniformity",
    "ingest",
    "make_screen_set",
    "mann_whitney_u",
    "nearest_screenshots",
    "normalize",
    "normalize_rows",
    "pairwise_cost",
    "rank_apps",
    "solve_exact",
    "solve_sinkhorn",
    "uniform_marginal",
    "uniformity_loss",
    "welch_ttest",
]

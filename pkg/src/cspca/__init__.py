"""Convex sparse PCA for feature analysis.

Learns a d x d projection matrix by minimizing a robust per-sample
reconstruction loss plus row-sparsity (l2,1) and low-rank (trace norm)
penalties, then scores features by the row norms of the solution.  Ships
a classical-PCA equivalence checker, k-means evaluation with the
ACC/NMI metrics, a synthetic data generator, and a CLI.
"""

__version__ = "0.1.0"

from .dataio import (
    DataError,
    DataMatrix,
    SyntheticSpec,
    center_features,
    generate_synthetic,
    load_csv,
    load_labels,
    load_results,
    save_matrix,
    save_results,
)
from .evaluation import (
    ClusterLabels,
    EvalReport,
    accuracy,
    evaluate_selection,
    kmeans,
    nmi,
)
from .features import (
    FeatureRanking,
    max_variance_ranking,
    project,
    restrict_to_features,
    score_features,
    select_top_k,
)
from .kernels import BACKEND
from .norms import (
    ObjectiveValue,
    ProjectionMatrix,
    evaluate_objective,
    l21_norm,
    residual_l21_loss,
    trace_norm,
)
from .pca import (
    EquivalenceReport,
    PcaModel,
    check_equivalence,
    classical_pca,
    lowrank_regression_fit,
)
from .solver import (
    Constant,
    Identity,
    NumericalError,
    RandomGaussian,
    ScaledIdentity,
    SolverConfig,
    SolverResult,
    SolverTrace,
    reweighted_update,
    residual_matrix,
    residual_weights,
    row_weights,
    solve,
    stationarity_residual,
    trace_weights,
)

__all__ = [
    "BACKEND",
    "ClusterLabels",
    "Constant",
    "DataError",
    "DataMatrix",
    "EquivalenceReport",
    "EvalReport",
    "FeatureRanking",
    "Identity",
    "NumericalError",
    "ObjectiveValue",
    "PcaModel",
    "ProjectionMatrix",
    "RandomGaussian",
    "ScaledIdentity",
    "SolverConfig",
    "SolverResult",
    "SolverTrace",
    "SyntheticSpec",
    "accuracy",
    "center_features",
    "check_equivalence",
    "classical_pca",
    "evaluate_objective",
    "evaluate_selection",
    "generate_synthetic",
    "kmeans",
    "l21_norm",
    "load_csv",
    "load_labels",
    "load_results",
    "lowrank_regression_fit",
    "max_variance_ranking",
    "nmi",
    "project",
    "residual_l21_loss",
    "residual_matrix",
    "residual_weights",
    "restrict_to_features",
    "reweighted_update",
    "row_weights",
    "save_matrix",
    "save_results",
    "score_features",
    "select_top_k",
    "solve",
    "stationarity_residual",
    "trace_norm",
    "trace_weights",
]

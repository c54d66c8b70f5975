"""Feature scoring, ranking, selection and out-of-sample projection.

The importance score of feature i is the Euclidean norm of row i of the
learned projection matrix; a feature whose row was driven to zero by the
row-sparsity penalty contributes nothing to any projected coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataio import DataMatrix
from .kernels import row_norms
from .norms import ProjectionMatrix

TIE_RULE = "ascending_feature_index"


@dataclass
class FeatureRanking:
    """Per-feature scores plus the permutation sorting them descending.

    Ties are broken by ascending feature index so rankings are
    reproducible.
    """

    scores: np.ndarray
    order: np.ndarray
    tie_rule: str = field(default=TIE_RULE)


def _rank(scores: np.ndarray) -> FeatureRanking:
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(scores=scores, order=order.astype(np.int64))


def score_features(W: ProjectionMatrix) -> FeatureRanking:
    """Score each feature by the norm of its row of W and rank descending."""
    return _rank(row_norms(W.values))


def select_top_k(ranking: FeatureRanking, k: int) -> list[int]:
    """The k best-ranked feature indices, in ranked order."""
    d = len(ranking.scores)
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}], got {k}")
    return [int(i) for i in ranking.order[:k]]


def project(W: ProjectionMatrix, x: np.ndarray, mean: np.ndarray | None = None) -> np.ndarray:
    """Project one sample: W^T (x - mean), or W^T x when no mean is given.

    Works for samples never seen during training; pass the training-time
    feature means so out-of-sample points get centered consistently.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != W.d:
        raise ValueError(f"sample has {x.shape[0]} entries, W expects {W.d}")
    if mean is not None:
        mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        if mean.shape[0] != W.d:
            raise ValueError(f"mean has {mean.shape[0]} entries, W expects {W.d}")
        x = x - mean
    return W.values.T @ x


def restrict_to_features(X: DataMatrix, selected) -> DataMatrix:
    """Row-submatrix of X at the selected feature indices, order preserved."""
    idx = [int(i) for i in selected]
    if not idx:
        raise ValueError("selection is empty")
    bad = [i for i in idx if not 0 <= i < X.d]
    if bad:
        raise ValueError(f"selected indices out of range [0, {X.d}): {bad}")
    names = None
    if X.feature_names is not None:
        names = [X.feature_names[i] for i in idx]
    return DataMatrix(X.values[idx, :], feature_names=names)


def max_variance_ranking(X: DataMatrix) -> FeatureRanking:
    """Baseline ranking by per-feature sample variance (1/(n-1) normalization)."""
    return _rank(X.values.var(axis=1, ddof=1))

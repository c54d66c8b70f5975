"""Classical PCA via SVD and the low-rank-regression equivalence check.

Minimizing ||W^T X - X||_F^2 over rank-k matrices W is solved by
W = U1 U1^T, where U1 holds the top-k left singular vectors of X; the
projected samples W^T X then coincide with the classical PCA projection.
``check_equivalence`` verifies that identity numerically on a given X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import DataMatrix
from .norms import ProjectionMatrix


@dataclass
class PcaModel:
    """Top-k left singular vectors of the data and their singular values."""

    components: np.ndarray      # d x k, orthonormal columns
    singular_values: np.ndarray  # length k, nonincreasing
    k: int


@dataclass(frozen=True)
class EquivalenceReport:
    pca_projection_error: float
    regression_projection_error: float
    max_deviation: float


def _check_k(X: DataMatrix, k: int) -> None:
    limit = min(X.d, X.n)
    if not 1 <= k <= limit:
        raise ValueError(f"k must lie in [1, {limit}], got {k}")


def _left_vectors(X: DataMatrix, k: int):
    U, s, _ = np.linalg.svd(X.values, full_matrices=False)
    U1 = U[:, :k].copy()
    # sign convention: largest-magnitude entry of each component positive
    for j in range(k):
        idx = np.argmax(np.abs(U1[:, j]))
        if U1[idx, j] < 0:
            U1[:, j] = -U1[:, j]
    return U1, s[:k].copy()


def classical_pca(X: DataMatrix, k: int) -> PcaModel:
    """Top-k principal directions of X (columns are samples; center first)."""
    _check_k(X, k)
    U1, s1 = _left_vectors(X, k)
    return PcaModel(components=U1, singular_values=s1, k=k)


def lowrank_regression_fit(X: DataMatrix, k: int) -> ProjectionMatrix:
    """Rank-k minimizer of the squared reconstruction error.

    Returns the canonical member W = U1 U1^T of the solution family
    (symmetric, idempotent, rank k); the projection W^T X is the same for
    every member of the family.
    """
    _check_k(X, k)
    U1, _ = _left_vectors(X, k)
    return ProjectionMatrix(U1 @ U1.T)


def check_equivalence(X: DataMatrix, k: int) -> EquivalenceReport:
    """Compare the regression projection W^T X with the PCA projection.

    max_deviation is the largest entrywise difference between the two
    projected sample matrices; both reconstruction errors are reported
    alongside for context.
    """
    W = lowrank_regression_fit(X, k)
    model = classical_pca(X, k)
    proj_regression = W.values.T @ X.values
    proj_pca = model.components @ (model.components.T @ X.values)
    return EquivalenceReport(
        pca_projection_error=float(np.linalg.norm(proj_pca - X.values)),
        regression_projection_error=float(np.linalg.norm(proj_regression - X.values)),
        max_deviation=float(np.max(np.abs(proj_regression - proj_pca))),
    )

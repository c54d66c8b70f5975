"""Matrix norms and exact evaluation of the regularized reconstruction objective.

The objective for a projection W on data X (both d x d / d x n) is

    sum_i ||W^T x_i - x_i||_2  +  alpha * ||W||_{2,1}  +  beta * ||W||_*

where ||A||_{2,1} sums the Euclidean norms of A's rows and ||A||_* sums
the singular values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import DataMatrix
from .kernels import row_norms


@dataclass
class ProjectionMatrix:
    """Square d x d coefficient matrix; row i belongs to input feature i."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"projection matrix must be square, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("projection matrix contains NaN or infinite entries")
        self.values = values

    @property
    def d(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ObjectiveValue:
    """One evaluation of the objective, split into its three parts."""

    loss: float
    l21_penalty: float
    trace_penalty: float
    total: float
    alpha: float
    beta: float


def l21_norm(A) -> float:
    """Sum over rows of the Euclidean row norm."""
    A = np.asarray(A, dtype=np.float64)
    if not np.isfinite(A).all():
        raise ValueError("l21_norm: non-finite input")
    return float(row_norms(np.atleast_2d(A)).sum())


def trace_norm(A) -> float:
    """Sum of singular values (nuclear norm), via SVD."""
    A = np.asarray(A, dtype=np.float64)
    if not np.isfinite(A).all():
        raise ValueError("trace_norm: non-finite input")
    return float(np.linalg.svd(np.atleast_2d(A), compute_uv=False).sum())


def residual_l21_loss(W: ProjectionMatrix, X: DataMatrix) -> float:
    """Robust reconstruction loss: sum over samples of ||W^T x_i - x_i||_2."""
    if W.d != X.d:
        raise ValueError(f"dimension mismatch: W is {W.d}x{W.d}, X has {X.d} features")
    E = (W.values.T @ X.values - X.values).T
    return float(row_norms(E).sum())


def evaluate_objective(W: ProjectionMatrix, X: DataMatrix,
                       alpha: float, beta: float) -> ObjectiveValue:
    """Evaluate loss + alpha*l21 + beta*trace at W."""
    if alpha <= 0 or beta <= 0:
        raise ValueError(f"alpha and beta must be positive, got {alpha}, {beta}")
    loss = residual_l21_loss(W, X)
    l21 = l21_norm(W.values)
    trace = trace_norm(W.values)
    return ObjectiveValue(
        loss=loss,
        l21_penalty=l21,
        trace_penalty=trace,
        total=loss + alpha * l21 + beta * trace,
        alpha=float(alpha),
        beta=float(beta),
    )

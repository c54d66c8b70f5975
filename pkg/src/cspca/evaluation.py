"""K-means clustering and the two label-agreement metrics.

Accuracy aligns predicted cluster ids with ground-truth classes through a
maximum-weight assignment on the contingency table (Kuhn-Munkres); NMI is
mutual information normalized by the geometric mean of the two label
entropies, computed with natural logarithms (the ratio is base-free).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dataio import DataMatrix
from .features import restrict_to_features
from .kernels import contingency_table, nearest_centers, sum_by_label


@dataclass
class ClusterLabels:
    """Integer labels in [0, c) for n samples."""

    labels: np.ndarray
    c: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.c < 1:
            raise ValueError("cluster count must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.c):
            raise ValueError(f"labels must lie in [0, {self.c})")
        self.labels = labels

    @property
    def n(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class EvalReport:
    acc_mean: float
    acc_std: float
    nmi_mean: float
    nmi_std: float
    runs: int
    seeds: list[int]


def _as_labels(x) -> ClusterLabels:
    if isinstance(x, ClusterLabels):
        return x
    arr = np.asarray(x, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty label vector")
    return ClusterLabels(arr, int(arr.max()) + 1)


def kmeans(X: DataMatrix, c: int, seed: int, max_iter: int = 300) -> ClusterLabels:
    """Lloyd's algorithm with seeded initialization from c distinct samples.

    Deterministic for a fixed seed.  Stops when assignments stabilize or
    after max_iter rounds.  A cluster left empty is reseeded to the point
    farthest from its assigned centroid.
    """
    if c < 1:
        raise ValueError("cluster count must be positive")
    if c > X.n:
        raise ValueError(f"cannot form {c} clusters from {X.n} samples")
    points = np.ascontiguousarray(X.values.T)
    rng = np.random.default_rng(seed)
    centers = points[rng.choice(X.n, size=c, replace=False)].copy()

    labels = None
    for _ in range(max_iter):
        new_labels, dist2 = nearest_centers(points, centers)
        counts = np.bincount(new_labels, minlength=c)
        for j in np.flatnonzero(counts == 0):
            far = int(np.argmax(dist2))
            new_labels[far] = j
            dist2[far] = -1.0
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        sums, counts = sum_by_label(points, labels, c)
        centers = sums / counts[:, None]
    return ClusterLabels(labels, c)


def accuracy(pred, truth) -> float:
    """Fraction of samples matched after optimally permuting cluster ids."""
    pred, truth = _as_labels(pred), _as_labels(truth)
    if pred.n != truth.n:
        raise ValueError(f"label lengths differ: {pred.n} vs {truth.n}")
    side = max(pred.c, truth.c)
    table = np.zeros((side, side), dtype=np.int64)
    table[: pred.c, : truth.c] = contingency_table(pred.labels, truth.labels,
                                                   pred.c, truth.c)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum()) / pred.n


def nmi(pred, truth) -> float:
    """Normalized mutual information of two labelings, in [0, 1].

    Identical set partitions score exactly 1.0 (there the mutual
    information equals the entropy, so the ratio is 1 by construction).
    When either side is a single cluster the entropy ratio is undefined;
    that case returns 1.0 for identical partitions and 0.0 otherwise.
    """
    pred, truth = _as_labels(pred), _as_labels(truth)
    if pred.n != truth.n:
        raise ValueError(f"label lengths differ: {pred.n} vs {truth.n}")
    n = pred.n
    table = contingency_table(pred.labels, truth.labels, pred.c, truth.c)
    if _same_partition(table):
        return 1.0
    row = table.sum(axis=1)
    col = table.sum(axis=0)

    h_pred = _entropy(row, n)
    h_truth = _entropy(col, n)
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0

    nz = table > 0
    t = table[nz].astype(np.float64)
    outer = np.outer(row, col)[nz].astype(np.float64)
    info = float(np.sum((t / n) * np.log(n * t / outer)))
    return info / np.sqrt(h_pred * h_truth)


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0].astype(np.float64) / n
    return float(-np.sum(p * np.log(p)))


def _same_partition(table: np.ndarray) -> bool:
    # identical set partitions <=> at most one nonzero cell per row and column
    nz = table > 0
    return bool((nz.sum(axis=1) <= 1).all() and (nz.sum(axis=0) <= 1).all())


def evaluate_selection(X: DataMatrix, selected, truth, c: int, runs: int,
                       base_seed: int) -> EvalReport:
    """Cluster X restricted to the selected features, repeatedly, and aggregate.

    Runs k-means with seeds base_seed .. base_seed+runs-1 and reports the
    mean and population standard deviation of ACC and NMI against the
    ground-truth labels.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    truth = _as_labels(truth)
    if truth.n != X.n:
        raise ValueError(f"ground truth has {truth.n} labels for {X.n} samples")
    sub = restrict_to_features(X, selected)
    seeds = [int(base_seed) + i for i in range(runs)]
    accs = np.empty(runs)
    nmis = np.empty(runs)
    for i, seed in enumerate(seeds):
        pred = kmeans(sub, c, seed)
        accs[i] = accuracy(pred, truth)
        nmis[i] = nmi(pred, truth)
    return EvalReport(
        acc_mean=float(accs.mean()),
        acc_std=float(accs.std()),
        nmi_mean=float(nmis.mean()),
        nmi_std=float(nmis.std()),
        runs=runs,
        seeds=seeds,
    )

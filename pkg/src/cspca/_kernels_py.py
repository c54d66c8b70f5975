"""Pure-numpy implementations of the hot loop kernels.

Mirrors the interface of the compiled extension ``cspca._kernels_cy``;
``cspca.kernels`` picks one of the two at import time.
"""

import numpy as np


def row_norms(a):
    """Euclidean norm of every row of a 2-d array."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    return np.sqrt(np.einsum("ij,ij->i", a, a))


def nearest_centers(points, centers):
    """Index of the closest center per point, ties to the lowest index.

    Returns (labels, dist2) where dist2[i] is the squared distance from
    points[i] to its assigned center.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels.astype(np.int64), d2[np.arange(points.shape[0]), labels]


def sum_by_label(points, labels, n_groups):
    """Per-label sums and counts of the rows of ``points``."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    sums = np.zeros((n_groups, points.shape[1]))
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=n_groups).astype(np.int64)
    return sums, counts


def contingency_table(a, b, na, nb):
    """Joint count matrix of two label vectors."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    flat = np.bincount(a * nb + b, minlength=na * nb)
    return flat.reshape(na, nb).astype(np.int64)

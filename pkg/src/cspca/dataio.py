"""Data loading, validation, synthesis and result persistence.

In-memory convention: a data matrix is d x n with one column per sample.
CSV files may store samples as rows or as columns; loading converts to the
column-per-sample layout either way.

Results (traces, rankings, reports) are serialized as JSON with insertion-
ordered keys and ``repr``-precision floats, so every numeric field survives
a round trip bit-exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DataError(Exception):
    """Raised when input data is missing, malformed, or inconsistent."""


@dataclass
class DataMatrix:
    """d x n real matrix, one column per sample.

    feature_names, when given, has length d and no empty entries.
    """

    values: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        # canonical C-contiguous storage: results must not depend on whether
        # the source file stored samples as rows or as columns
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError(f"data matrix must be 2-d, got shape {values.shape}")
        d, n = values.shape
        if d < 1:
            raise DataError("data matrix needs at least one feature row")
        if n < 2:
            raise DataError(f"need at least 2 samples, got {n}")
        if not np.isfinite(values).all():
            raise DataError("data matrix contains NaN or infinite entries")
        if self.feature_names is not None:
            names = [str(s) for s in self.feature_names]
            if len(names) != d:
                raise DataError(
                    f"{len(names)} feature names for {d} features"
                )
            if any(not s.strip() for s in names):
                raise DataError("feature names must be non-empty")
            self.feature_names = names
        self.values = values

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic clustering dataset with planted structure.

    Cluster structure lives in the first ``n_informative`` features; the
    remaining ``n_noise`` features are i.i.d. zero-mean noise.  A fraction
    of the sample columns is replaced by heavy-tailed corruption scaled to
    10x each feature's clean standard deviation.
    """

    n_samples: int
    n_informative: int
    n_noise: int
    n_clusters: int
    cluster_separation: float
    noise_scale: float
    outlier_fraction: float
    seed: int

    def __post_init__(self):
        if self.n_samples < 2:
            raise DataError("n_samples must be at least 2")
        if self.n_informative < 1:
            raise DataError("n_informative must be positive")
        if self.n_noise < 0:
            raise DataError("n_noise must be nonnegative")
        if self.n_clusters < 2:
            raise DataError("n_clusters must be at least 2")
        if self.n_clusters > self.n_samples:
            raise DataError("more clusters than samples")
        if self.cluster_separation <= 0:
            raise DataError("cluster_separation must be positive")
        if self.noise_scale < 0:
            raise DataError("noise_scale must be nonnegative")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise DataError("outlier_fraction must lie in [0, 1)")
        if self.seed < 0:
            raise DataError("seed must be nonnegative")


def load_csv(path, has_header: bool, samples_as: str) -> DataMatrix:
    """Read a rectangular numeric CSV into the column-per-sample layout.

    samples_as says how the file is oriented ("rows" or "columns").  A
    header row becomes feature names only in the rows orientation (in the
    columns orientation the header labels samples and is discarded).
    Parse failures report the 1-based file row and column of the bad cell.
    """
    if samples_as not in ("rows", "columns"):
        raise ValueError(f"samples_as must be 'rows' or 'columns', got {samples_as!r}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            raw = [row for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise DataError(f"{path} is empty")

    header = None
    if has_header:
        header = [cell.strip() for cell in raw[0]]
        raw = raw[1:]
        if not raw:
            raise DataError(f"{path} has a header but no data rows")

    width = len(raw[0])
    table = np.empty((len(raw), width))
    offset = 2 if has_header else 1
    for i, row in enumerate(raw):
        if len(row) != width:
            raise DataError(
                f"{path}: row {i + offset} has {len(row)} cells, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                table[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric cell {cell.strip()!r} at "
                    f"row {i + offset}, column {j + 1}"
                ) from None

    values = table.T if samples_as == "rows" else table
    names = None
    if header is not None and samples_as == "rows":
        names = header
    if values.shape[1] < 2:
        raise DataError(f"{path}: fewer than 2 samples")
    try:
        return DataMatrix(values, feature_names=names)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc


def write_matrix_csv(values, path, header: Sequence[str] | None = None) -> None:
    """Write a 2-d array as CSV with full round-trip float precision."""
    values = np.asarray(values, dtype=np.float64)
    lines = []
    if header is not None:
        lines.append(",".join(str(h) for h in header))
    for row in values:
        lines.append(",".join(repr(float(v)) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def save_matrix(X: DataMatrix, path, samples_as: str = "rows",
                include_header: bool = True) -> None:
    """Write a DataMatrix as CSV; inverse of load_csv for the same orientation."""
    if samples_as not in ("rows", "columns"):
        raise ValueError(f"samples_as must be 'rows' or 'columns', got {samples_as!r}")
    header = None
    if include_header and X.feature_names is not None and samples_as == "rows":
        header = X.feature_names
    table = X.values.T if samples_as == "rows" else X.values
    write_matrix_csv(table, path, header=header)


def center_features(X: DataMatrix) -> tuple[DataMatrix, np.ndarray]:
    """Subtract each feature row's mean; returns the centered matrix and the means."""
    mean = X.values.mean(axis=1)
    centered = X.values - mean[:, None]
    return DataMatrix(centered, feature_names=X.feature_names), mean


def _simplex_vertices(k: int) -> np.ndarray:
    # k points in R^{k-1}, centered at the origin, all pairwise distances 1
    V = np.eye(k)[:, : k - 1]
    V = V - V.mean(axis=0)
    return V / np.sqrt(2.0)


def generate_synthetic(spec: SyntheticSpec) -> tuple[DataMatrix, np.ndarray, list[int]]:
    """Deterministic synthetic dataset with planted cluster structure.

    Returns (X, labels, informative_indices).  Cluster centers sit at a
    randomly rotated regular simplex with edge length cluster_separation,
    so every informative dimension carries between-cluster structure when
    n_clusters <= n_informative + 1 (otherwise centers are random Gaussian
    rescaled to that minimum pairwise distance).
    """
    rng = np.random.default_rng(spec.seed)
    k = spec.n_clusters
    p = spec.n_informative
    d = p + spec.n_noise
    n = spec.n_samples

    if k - 1 <= p:
        simplex = _simplex_vertices(k) * spec.cluster_separation
        basis = np.linalg.qr(rng.standard_normal((p, p)))[0]
        centers = simplex @ basis[: k - 1, :]
    else:
        centers = rng.standard_normal((k, p))
        dmin = min(
            np.linalg.norm(centers[i] - centers[j])
            for i in range(k)
            for j in range(i + 1, k)
        )
        centers *= spec.cluster_separation / max(dmin, 1e-12)

    counts = [n // k + (1 if i < n % k else 0) for i in range(k)]
    labels = np.repeat(np.arange(k), counts)
    rng.shuffle(labels)

    informative = centers[labels].T + rng.standard_normal((p, n))
    if spec.n_noise:
        noise = spec.noise_scale * rng.standard_normal((spec.n_noise, n))
        values = np.vstack([informative, noise])
    else:
        values = informative

    n_outliers = int(round(spec.outlier_fraction * n))
    if n_outliers:
        idx = rng.choice(n, size=n_outliers, replace=False)
        scale = values.std(axis=1, ddof=1)
        values[:, idx] = 10.0 * scale[:, None] * rng.standard_t(2.0, size=(d, n_outliers))

    return DataMatrix(values), labels.astype(np.int64), list(range(p))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def save_results(report, path) -> None:
    """Serialize a result object (dataclass, dict, list, scalars) to JSON.

    Keys keep insertion order; floats are written with ``repr`` precision,
    so numeric fields round-trip exactly.  The file appears atomically:
    on failure no partial file is left behind.
    """
    payload = json.dumps(_jsonable(report), indent=2, allow_nan=False)
    _atomic_write(path, payload + "\n")


def load_results(path) -> dict:
    """Read back a file written by save_results."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not a valid results file: {exc}") from exc


def load_labels(path, has_header: bool = False) -> np.ndarray:
    """Read a single-column CSV of integer ground-truth labels."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if has_header:
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path} contains no labels")
    labels = np.empty(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        if len(row) != 1:
            raise DataError(f"{path}: expected one label per row, row {i + 1} has {len(row)}")
        cell = row[0].strip()
        try:
            labels[i] = int(float(cell))
        except ValueError:
            raise DataError(f"{path}: non-integer label {cell!r} at row {i + 1}") from None
    return labels


def _atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise DataError(f"cannot write {path}: {exc}") from exc

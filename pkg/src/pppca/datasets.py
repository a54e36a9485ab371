"""CSV ingestion, horizontal partitioning, and a synthetic benchmark table.

The benchmark generator mirrors the shape of the UCI red-wine quality table
(1599 rows, 11 physico-chemical features, an integer quality score) so the
evaluation pipeline can run at the same scale in environments where the
real file is not present.  Point the CLI at the genuine CSV whenever it is
available; the two are interchangeable for every check in this package.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .linalg import check_matrix


@dataclass
class Dataset:
    """A feature matrix with optional labels and column names."""

    features: np.ndarray
    labels: np.ndarray | None = None
    columns: list[str] | None = None
    label_name: str | None = None

    def __post_init__(self):
        self.features = check_matrix(self.features, name="features")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=float)
            if self.labels.shape != (self.features.shape[0],):
                raise DataError(
                    f"label count {self.labels.shape} does not match "
                    f"{self.features.shape[0]} rows"
                )
        if self.columns is not None and len(self.columns) != self.features.shape[1]:
            raise DataError(
                f"{len(self.columns)} column names for "
                f"{self.features.shape[1]} columns"
            )

    @property
    def rows(self) -> int:
        return self.features.shape[0]

    @property
    def cols(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            features=self.features[idx],
            labels=None if self.labels is None else self.labels[idx],
            columns=self.columns,
            label_name=self.label_name,
        )


def load_csv(
    path,
    label_column: str | None = None,
    header: bool = True,
    delimiter: str = ",",
) -> Dataset:
    """Parse a rectangular numeric CSV, splitting out an optional label column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            raw = [row for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise DataError(f"{path}: file is empty")

    if header:
        columns = [c.strip() for c in raw[0]]
        body = raw[1:]
        first_line = 2
    else:
        columns = [f"col{i}" for i in range(len(raw[0]))]
        body = raw
        first_line = 1
    if not body:
        raise DataError(f"{path}: no data rows")

    width = len(columns)
    values = np.empty((len(body), width))
    for r, row in enumerate(body):
        if len(row) != width:
            raise DataError(
                f"{path}: line {first_line + r} has {len(row)} cells, expected {width}"
            )
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric cell {cell!r} at line {first_line + r}, "
                    f"column {columns[c]!r}"
                ) from None

    if label_column is None:
        return Dataset(features=values, columns=columns)
    if label_column not in columns:
        raise DataError(
            f"{path}: no column named {label_column!r}; have {columns}"
        )
    li = columns.index(label_column)
    keep = [c for c in range(width) if c != li]
    return Dataset(
        features=values[:, keep],
        labels=values[:, li],
        columns=[columns[c] for c in keep],
        label_name=label_column,
    )


def save_csv(ds: Dataset, path, delimiter: str = ","):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        names = ds.columns or [f"col{i}" for i in range(ds.cols)]
        if ds.labels is not None:
            writer.writerow(names + [ds.label_name or "label"])
            for row, label in zip(ds.features, ds.labels):
                writer.writerow([repr(float(v)) for v in row] + [repr(float(label))])
        else:
            writer.writerow(names)
            for row in ds.features:
                writer.writerow([repr(float(v)) for v in row])


def assign_providers(rows: int, parties: int, seed: int | None) -> np.ndarray:
    """Shuffled assignment of each row to a provider, sizes differing by <= 1."""
    if parties < 2:
        raise DataError(f"need at least 2 providers, got {parties}")
    if rows < parties:
        raise DataError(f"{rows} rows cannot be split across {parties} providers")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(rows)
    assignment = np.empty(rows, dtype=int)
    for q, chunk in enumerate(np.array_split(perm, parties)):
        assignment[chunk] = q
    return assignment


def partition_horizontal(
    ds: Dataset, parties: int, seed: int | None = None
) -> list[Dataset]:
    """Split rows across providers; each part keeps its labels."""
    assignment = assign_providers(ds.rows, parties, seed)
    return [ds.take(np.flatnonzero(assignment == q)) for q in range(parties)]


WINE_FEATURES = [
    "fixed acidity",
    "volatile acidity",
    "citric acid",
    "residual sugar",
    "chlorides",
    "free sulfur dioxide",
    "total sulfur dioxide",
    "density",
    "pH",
    "sulphates",
    "alcohol",
]

# Rough location/scale of each red-wine feature, used by the generator.
_WINE_MARGINALS = [
    (8.3, 1.7),
    (0.53, 0.18),
    (0.27, 0.19),
    (2.5, 1.4),
    (0.087, 0.047),
    (15.9, 10.4),
    (46.5, 32.9),
    (0.9967, 0.0019),
    (3.31, 0.15),
    (0.66, 0.17),
    (10.4, 1.07),
]


def make_wine_like(rows: int = 1599, seed: int = 20240817) -> Dataset:
    """A deterministic surrogate for the red-wine quality table.

    Eleven correlated features on realistic scales plus an integer quality
    score in [3, 8] driven by a noisy linear model, giving the downstream
    regression something real to fit.
    """
    if rows < 20:
        raise DataError("need at least 20 rows for a usable benchmark table")
    rng = np.random.default_rng(seed)
    d = len(WINE_FEATURES)
    latent = rng.normal(size=(rows, 4))
    mixing = rng.normal(size=(4, d)) * 0.7
    z = latent @ mixing + rng.normal(size=(rows, d)) * 0.6
    means = np.array([m for m, _ in _WINE_MARGINALS])
    scales = np.array([s for _, s in _WINE_MARGINALS])
    features = means + z * scales
    # Acidity, sugar, sulfur and friends are physically non-negative.
    features[:, :7] = np.abs(features[:, :7])
    features[:, 8:] = np.abs(features[:, 8:])

    signal = (z @ rng.normal(size=d)) / np.sqrt(d)
    quality = 5.6 + 0.9 * signal + rng.normal(size=rows) * 0.6
    quality = np.clip(np.rint(quality), 3, 8)
    return Dataset(
        features=features,
        labels=quality,
        columns=list(WINE_FEATURES),
        label_name="quality",
    )


def make_blobs(
    rows: int = 400,
    cols: int = 6,
    separation: float = 4.0,
    seed: int = 7,
) -> Dataset:
    """Two linearly separable Gaussian clusters with binary labels."""
    rng = np.random.default_rng(seed)
    half = rows // 2
    direction = rng.normal(size=cols)
    direction /= np.linalg.norm(direction)
    a = rng.normal(size=(half, cols)) + separation / 2 * direction
    b = rng.normal(size=(rows - half, cols)) - separation / 2 * direction
    features = np.vstack([a, b])
    labels = np.concatenate([np.ones(half), np.zeros(rows - half)])
    perm = rng.permutation(rows)
    return Dataset(features=features[perm], labels=labels[perm])


def standardize_features(ds: Dataset) -> Dataset:
    """Divide each feature by its population standard deviation.

    Plaintext preprocessing outside the privacy boundary; the protocol
    itself only ever centers by the securely computed mean.
    """
    std = ds.features.std(axis=0)
    if np.any(std == 0):
        dead = int(np.flatnonzero(std == 0)[0])
        raise DataError(f"cannot standardize constant column {dead}")
    return Dataset(
        features=ds.features / std,
        labels=ds.labels,
        columns=ds.columns,
        label_name=ds.label_name,
    )

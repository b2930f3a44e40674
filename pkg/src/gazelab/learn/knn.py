"""k-nearest-neighbour classifier (brute force, Euclidean distance)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..features import LabeledMatrix


@dataclass
class KnnModel:
    train_rows: np.ndarray
    train_labels: np.ndarray
    k: int
    n_classes: int


def knn_fit(train: LabeledMatrix, k: int = 3) -> KnnModel:
    if k < 1:
        raise UsageError("k must be >= 1")
    if k > len(train):
        raise UsageError(f"k={k} exceeds the {len(train)} training rows")
    return KnnModel(
        train_rows=np.array(train.rows, dtype=float),
        train_labels=np.array(train.labels, dtype=int),
        k=k,
        n_classes=train.n_classes,
    )


def _neighbours(model: KnnModel, row: np.ndarray) -> np.ndarray:
    """Indices of the k nearest training rows; distance ties go to the
    lower training index (stable sort)."""
    d = np.sqrt(((model.train_rows - row) ** 2).sum(axis=1))
    order = np.argsort(d, kind="stable")
    return order[: model.k], d


def knn_predict(model: KnnModel, rows) -> np.ndarray:
    """Majority vote over the k nearest neighbours.

    Vote ties are broken by the smallest mean neighbour distance among the
    tied classes, then by the lowest class id.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    out = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        nn, d = _neighbours(model, row)
        labels = model.train_labels[nn]
        counts = np.bincount(labels, minlength=model.n_classes)
        best = counts.max()
        tied = np.flatnonzero(counts == best)
        if len(tied) == 1:
            out[i] = tied[0]
        else:
            mean_dist = [d[nn[labels == c]].mean() for c in tied]
            out[i] = tied[int(np.argmin(mean_dist))]
    return out

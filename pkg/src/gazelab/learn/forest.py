"""Random forest of CART trees, used mainly for feature ranking.

Trees are grown on bootstrap resamples with sqrt(d) feature subsampling and
Gini impurity splits.  A feature's importance is the impurity decrease it
caused, weighted by the fraction of samples reaching the node, averaged
over trees and normalised to sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..features import LabeledMatrix


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: int = 0


@dataclass
class ForestModel:
    trees: list[TreeNode]
    importances: np.ndarray
    n_classes: int
    max_depth: int


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p**2).sum())


def _best_split(x: np.ndarray, y: np.ndarray, features: np.ndarray, n_classes: int):
    """Best (feature, threshold, gain) over the candidate features.

    For one feature the labels are sorted by value and class counts are
    accumulated, so every threshold between distinct values is scored in
    one pass.
    """
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes)
    parent_gini = _gini(parent_counts)
    best = (None, 0.0, 0.0)
    for f in features:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), ys] = 1.0
        left_counts = np.cumsum(onehot, axis=0)  # counts for splits after i+1 samples
        cut = np.flatnonzero(xs[:-1] < xs[1:])  # split between distinct values
        if cut.size == 0:
            continue
        nl = (cut + 1).astype(float)
        nr = n - nl
        lc = left_counts[cut]
        rc = parent_counts[None, :] - lc
        gini_l = 1.0 - ((lc / nl[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((rc / nr[:, None]) ** 2).sum(axis=1)
        gain = parent_gini - (nl / n) * gini_l - (nr / n) * gini_r
        k = int(np.argmax(gain))
        if gain[k] > best[2] + 1e-15:
            threshold = (xs[cut[k]] + xs[cut[k] + 1]) / 2.0
            best = (int(f), float(threshold), float(gain[k]))
    return best


def _grow(x, y, depth, max_depth, n_classes, n_total, rng, importances) -> TreeNode:
    counts = np.bincount(y, minlength=n_classes)
    majority = int(np.argmax(counts))
    if depth >= max_depth or _gini(counts) == 0.0 or len(y) < 2:
        return TreeNode(label=majority)
    d = x.shape[1]
    k = max(1, int(np.sqrt(d)))
    features = rng.choice(d, size=k, replace=False)
    feature, threshold, gain = _best_split(x, y, features, n_classes)
    if feature is None or gain <= 0.0:
        return TreeNode(label=majority)
    importances[feature] += (len(y) / n_total) * gain
    go_left = x[:, feature] <= threshold
    left = _grow(x[go_left], y[go_left], depth + 1, max_depth, n_classes, n_total, rng, importances)
    right = _grow(x[~go_left], y[~go_left], depth + 1, max_depth, n_classes, n_total, rng, importances)
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right, label=majority)


def forest_fit(train: LabeledMatrix, n_estimators: int = 200, max_depth: int = 8,
               seed: int = 0) -> ForestModel:
    if n_estimators < 1 or max_depth < 1:
        raise UsageError("n_estimators and max_depth must be >= 1")
    if train.n_classes < 2:
        raise UsageError("need at least two classes")
    x, y = train.rows, train.labels
    n, d = x.shape
    rng = np.random.default_rng(seed)
    trees = []
    total = np.zeros(d)
    contributing = 0
    for _ in range(n_estimators):
        boot = rng.integers(0, n, n)
        imp = np.zeros(d)
        trees.append(_grow(x[boot], y[boot], 0, max_depth, train.n_classes, n, rng, imp))
        s = imp.sum()
        if s > 0:
            total += imp / s
            contributing += 1
    importances = total / contributing if contributing else total
    s = importances.sum()
    if s > 0:
        importances = importances / s
    return ForestModel(trees=trees, importances=importances,
                       n_classes=train.n_classes, max_depth=max_depth)


def forest_importance(train: LabeledMatrix, n_estimators: int = 200, max_depth: int = 8,
                      seed: int = 0) -> np.ndarray:
    """Normalised per-feature importance (sums to one)."""
    return forest_fit(train, n_estimators, max_depth, seed).importances


def _tree_predict(node: TreeNode, row: np.ndarray) -> int:
    while node.feature >= 0:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.label


def forest_predict(model: ForestModel, rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    out = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        votes = np.bincount(
            [_tree_predict(t, row) for t in model.trees], minlength=model.n_classes
        )
        out[i] = int(np.argmax(votes))
    return out

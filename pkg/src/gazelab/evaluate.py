"""Cross-validation, hyperparameter search and classification metrics.

Folds are stratified and standardization is refit inside every training
fold, so no statistic of a test fold leaks into what the model sees at fit
time.  Rates are macro-averaged one-vs-rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .dataset import fmt_float
from .errors import GazeDataError, UsageError
from .features import LabeledMatrix, apply_standardization, standardize
from .learn import (
    forest_fit,
    forest_predict,
    knn_fit,
    knn_predict,
    mlp_fit,
    mlp_predict,
    svm_fit,
    svm_predict,
)

MODEL_FAMILIES = ("knn", "svm", "mlp", "forest")


@dataclass(frozen=True)
class ModelSpec:
    """A model family plus the keyword arguments its fit function takes."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in MODEL_FAMILIES:
            raise UsageError(f"unknown model family {self.family!r}")

    def fit(self, train: LabeledMatrix, seed: int = 0):
        if self.family == "knn":
            return knn_fit(train, **self.params)
        if self.family == "svm":
            return svm_fit(train, **self.params)
        if self.family == "mlp":
            return mlp_fit(train, seed=seed, **self.params)
        return forest_fit(train, seed=seed, **self.params)

    def predict(self, model, rows) -> np.ndarray:
        if self.family == "knn":
            return knn_predict(model, rows)
        if self.family == "svm":
            return svm_predict(model, rows)
        if self.family == "mlp":
            return mlp_predict(model, rows)
        return forest_predict(model, rows)


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # [true, predicted]
    class_names: list[str]

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class RateReport:
    tpr: float
    fpr: float
    tnr: float
    fnr: float
    precision: float
    per_class: dict = field(default_factory=dict)
    undefined_precision_classes: list[int] = field(default_factory=list)


@dataclass
class CvResult:
    mean_accuracy: float
    fold_scores: np.ndarray
    fold_test_indices: list[np.ndarray]
    pooled_predictions: np.ndarray | None = None  # out-of-fold label per row


@dataclass
class GridSearchResult:
    best_params: dict
    table: list[tuple[dict, float, np.ndarray]]  # params, mean, fold scores


@dataclass
class LearningCurve:
    train_sizes: np.ndarray
    train_scores: np.ndarray
    cv_scores: np.ndarray


def stratified_folds(labels: np.ndarray, k_folds: int, seed: int) -> list[np.ndarray]:
    """Disjoint test-index arrays covering every row, class-balanced."""
    if k_folds < 2:
        raise UsageError("k_folds must be >= 2")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k_folds)]
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if members.size < k_folds:
            raise UsageError(
                f"class {c} has {members.size} samples; needs >= {k_folds} for {k_folds} folds"
            )
        members = members[rng.permutation(members.size)]
        for i, idx in enumerate(members):
            folds[i % k_folds].append(idx)
    return [np.sort(np.array(f)) for f in folds]


def _fit_eval_fold(matrix: LabeledMatrix, spec: ModelSpec, train_idx, test_idx, seed):
    train = matrix.subset(train_idx)
    train_std = standardize(train)
    test_rows = apply_standardization(
        matrix.rows[test_idx], train_std.column_mean, train_std.column_sd
    )
    model = spec.fit(train_std, seed=seed)
    pred = spec.predict(model, test_rows)
    return float(np.mean(pred == matrix.labels[test_idx])), pred


def kfold_cv(matrix: LabeledMatrix, spec: ModelSpec, k_folds: int = 10,
             seed: int = 0) -> CvResult:
    """Stratified k-fold accuracy, standardizing inside each training fold.

    The matrix must arrive unstandardized; anything else would bake test
    rows into the scaling.
    """
    if matrix.standardized:
        raise UsageError("pass raw features; folds standardize their own training split")
    folds = stratified_folds(matrix.labels, k_folds, seed)
    all_idx = np.arange(len(matrix))
    scores = np.empty(k_folds)
    pooled = np.empty(len(matrix), dtype=int)
    for f, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, test_idx)
        scores[f], pred = _fit_eval_fold(matrix, spec, train_idx, test_idx, seed + f)
        pooled[test_idx] = pred
    return CvResult(
        mean_accuracy=float(scores.mean()),
        fold_scores=scores,
        fold_test_indices=folds,
        pooled_predictions=pooled,
    )


def grid_search(matrix: LabeledMatrix, family: str, grid: dict[str, list],
                k_folds: int = 10, seed: int = 0) -> GridSearchResult:
    """Exhaustive CV over the grid; ties pick the smallest parameter tuple."""
    if not grid:
        raise UsageError("empty parameter grid")
    names = sorted(grid)
    table = []
    best_tuple = None
    best_score = -np.inf
    best_params: dict = {}
    for combo in sorted(product(*(grid[n] for n in names))):
        params = dict(zip(names, combo))
        result = kfold_cv(matrix, ModelSpec(family, params), k_folds, seed)
        table.append((params, result.mean_accuracy, result.fold_scores))
        if result.mean_accuracy > best_score:
            best_score = result.mean_accuracy
            best_tuple = combo
            best_params = params
    return GridSearchResult(best_params=best_params, table=table)


def classification_report(truth, predicted, n_classes: int,
                          class_names: list[str] | None = None):
    """Confusion matrix and macro-averaged one-vs-rest rates.

    Precision of a class that is never predicted is undefined; it counts as
    0 and the class id is flagged.  Classes absent from the truth vector
    are skipped in the TPR/FNR averages for the same reason.
    """
    truth = np.asarray(truth, dtype=int)
    predicted = np.asarray(predicted, dtype=int)
    if truth.size != predicted.size:
        raise UsageError("truth and predicted must have equal length")
    for arr, name in ((truth, "truth"), (predicted, "predicted")):
        bad = (arr < 0) | (arr >= n_classes)
        if bad.any():
            raise GazeDataError(f"{name} labels outside 0..{n_classes - 1}")
    if class_names is None:
        class_names = [str(c) for c in range(n_classes)]

    counts = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(truth, predicted):
        counts[t, p] += 1

    per_class: dict[int, dict[str, float]] = {}
    undefined: list[int] = []
    tprs, fprs, tnrs, fnrs, precisions = [], [], [], [], []
    for c in range(n_classes):
        tp = counts[c, c]
        fn = counts[c].sum() - tp
        fp = counts[:, c].sum() - tp
        tn = counts.sum() - tp - fn - fp
        rates = {"tp": tp, "fp": fp, "tn": tn, "fn": fn}
        if tp + fn > 0:
            rates["tpr"] = tp / (tp + fn)
            rates["fnr"] = fn / (tp + fn)
            tprs.append(rates["tpr"])
            fnrs.append(rates["fnr"])
        if tn + fp > 0:
            rates["tnr"] = tn / (tn + fp)
            rates["fpr"] = fp / (tn + fp)
            tnrs.append(rates["tnr"])
            fprs.append(rates["fpr"])
        if tp + fp > 0:
            rates["precision"] = tp / (tp + fp)
        else:
            rates["precision"] = 0.0
            undefined.append(c)
        precisions.append(rates["precision"])
        per_class[c] = rates

    cm = ConfusionMatrix(counts=counts, class_names=list(class_names))
    report = RateReport(
        tpr=float(np.mean(tprs)) if tprs else 0.0,
        fpr=float(np.mean(fprs)) if fprs else 0.0,
        tnr=float(np.mean(tnrs)) if tnrs else 0.0,
        fnr=float(np.mean(fnrs)) if fnrs else 0.0,
        precision=float(np.mean(precisions)) if precisions else 0.0,
        per_class=per_class,
        undefined_precision_classes=undefined,
    )
    return cm, report


def _stratified_subsample(matrix: LabeledMatrix, size: int, rng) -> LabeledMatrix:
    labels = matrix.labels
    classes = np.unique(labels)
    frac = size / len(matrix)
    chosen: list[int] = []
    for c in classes:
        members = np.flatnonzero(labels == c)
        members = members[rng.permutation(members.size)]
        take = max(1, int(round(members.size * frac)))
        chosen.extend(members[:take])
    return matrix.subset(np.sort(chosen))


def learning_curve(matrix: LabeledMatrix, spec: ModelSpec, sizes,
                   k_folds: int = 10, seed: int = 0) -> LearningCurve:
    """Train and CV accuracy at increasing training-set sizes."""
    sizes = np.asarray(sizes, dtype=int)
    if not (np.diff(sizes) > 0).all():
        raise UsageError("sizes must be strictly increasing")
    if sizes.max() > len(matrix):
        raise UsageError("largest size exceeds the available rows")
    rng = np.random.default_rng(seed)
    train_scores = np.empty(len(sizes))
    cv_scores = np.empty(len(sizes))
    for i, size in enumerate(sizes):
        sub = _stratified_subsample(matrix, int(size), rng)
        cv_scores[i] = kfold_cv(sub, spec, k_folds, seed).mean_accuracy
        sub_std = standardize(sub)
        model = spec.fit(sub_std, seed=seed)
        pred = spec.predict(model, sub_std.rows)
        train_scores[i] = float(np.mean(pred == sub_std.labels))
    return LearningCurve(train_sizes=sizes, train_scores=train_scores, cv_scores=cv_scores)


def write_confusion_csv(path: str | Path, cm: ConfusionMatrix) -> None:
    lines = ["true\\predicted," + ",".join(cm.class_names)]
    for i, name in enumerate(cm.class_names):
        lines.append(name + "," + ",".join(str(int(v)) for v in cm.counts[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_rates_csv(path: str | Path, named_reports) -> None:
    lines = ["dataset,tpr,fpr,tnr,fnr,precision"]
    for name, r in named_reports:
        lines.append(
            f"{name},{fmt_float(r.tpr)},{fmt_float(r.fpr)},{fmt_float(r.tnr)},"
            f"{fmt_float(r.fnr)},{fmt_float(r.precision)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_cv_table_csv(path: str | Path, table) -> None:
    """Grid-search table: parameter columns, mean accuracy, fold scores."""
    if not table:
        raise UsageError("empty table")
    names = sorted(table[0][0])
    lines = [",".join(names) + ",mean_accuracy,fold_scores"]
    for params, mean, folds in table:
        cells = ",".join(str(params[n]) for n in names)
        lines.append(f"{cells},{fmt_float(mean)},{' '.join(fmt_float(s) for s in folds)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_learning_curve_csv(path: str | Path, lc: LearningCurve) -> None:
    lines = ["train_size,train_accuracy,cv_accuracy"]
    for s, tr, cv in zip(lc.train_sizes, lc.train_scores, lc.cv_scores):
        lines.append(f"{int(s)},{fmt_float(tr)},{fmt_float(cv)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

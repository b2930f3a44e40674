"""Soft-margin SVM with an RBF kernel, trained by pairwise dual updates.

Each binary problem maximises the dual of the soft-margin objective by
repeatedly picking a multiplier that violates the KKT conditions and
optimising it jointly with a second one in closed form (the classic
two-variable update).  Multiclass problems train one binary machine per
class pair and vote.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError, UsageError
from ..features import LabeledMatrix


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a_i - b_j||^2) for all row pairs."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    sq = ((a**2).sum(axis=1)[:, None] + (b**2).sum(axis=1)[None, :] - 2.0 * a @ b.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class BinarySvm:
    class_neg: int
    class_pos: int
    support_x: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for the support vectors
    bias: float
    gamma: float
    # full-problem copies kept for feasibility checks
    alphas: np.ndarray = field(default=None, repr=False)
    train_y: np.ndarray = field(default=None, repr=False)
    objective_trace: np.ndarray = field(default=None, repr=False)

    def decision(self, rows: np.ndarray) -> np.ndarray:
        k = rbf_kernel(rows, self.support_x, self.gamma)
        return k @ self.dual_coef + self.bias


@dataclass
class SvmModel:
    pairs: list[BinarySvm]
    classes: list[int]
    C: float
    gamma: float


def _smo_train(K: np.ndarray, y: np.ndarray, C: float, tol: float,
               max_passes: int, max_iter: int):
    """Two-variable dual ascent until no multiplier violates KKT by > tol.

    Returns the multipliers, bias and the dual objective recorded after
    every sweep (it is non-decreasing: each pair update is an exact
    maximisation over the two coordinates).
    """
    n = len(y)
    alphas = np.zeros(n)
    b = 0.0
    errs = -y.astype(float)  # decision(x_k) - y_k, maintained incrementally
    objective_trace: list[float] = []

    def dual_objective() -> float:
        ay = alphas * y
        return float(alphas.sum() - 0.5 * ay @ K @ ay)

    passes = 0
    iters = 0
    while passes < max_passes:
        changed = 0
        for i in range(n):
            e_i = errs[i]
            if not ((y[i] * e_i < -tol and alphas[i] < C) or (y[i] * e_i > tol and alphas[i] > 0)):
                continue
            j = int(np.argmax(np.abs(errs - e_i)))
            if j == i:
                continue
            e_j = errs[j]
            a_i_old, a_j_old = alphas[i], alphas[j]
            if y[i] != y[j]:
                lo, hi = max(0.0, a_j_old - a_i_old), min(C, C + a_j_old - a_i_old)
            else:
                lo, hi = max(0.0, a_i_old + a_j_old - C), min(C, a_i_old + a_j_old)
            if lo >= hi:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            a_j = float(np.clip(a_j_old - y[j] * (e_i - e_j) / eta, lo, hi))
            if abs(a_j - a_j_old) < 1e-7:
                continue
            a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
            alphas[i], alphas[j] = a_i, a_j
            b1 = b - e_i - y[i] * (a_i - a_i_old) * K[i, i] - y[j] * (a_j - a_j_old) * K[i, j]
            b2 = b - e_j - y[i] * (a_i - a_i_old) * K[i, j] - y[j] * (a_j - a_j_old) * K[j, j]
            if 0 < a_i < C:
                new_b = b1
            elif 0 < a_j < C:
                new_b = b2
            else:
                new_b = (b1 + b2) / 2.0
            errs += (
                y[i] * (a_i - a_i_old) * K[:, i]
                + y[j] * (a_j - a_j_old) * K[:, j]
                + (new_b - b)
            )
            b = new_b
            changed += 1
            iters += 1
            if iters > max_iter:
                raise TrainingError(
                    f"SVM did not converge within {max_iter} pair updates "
                    f"(C={C}, tol={tol}, n={n})"
                )
        objective_trace.append(dual_objective())
        passes = passes + 1 if changed == 0 else 0
    return alphas, b, np.array(objective_trace)


def svm_fit(train: LabeledMatrix, C: float = 10.0, gamma: float = 1.0,
            tol: float = 1e-3, max_passes: int = 3, max_iter: int = 200_000) -> SvmModel:
    """Train one-vs-one RBF machines over every class pair."""
    if C <= 0 or gamma <= 0:
        raise UsageError("C and gamma must be positive")
    classes = sorted(set(int(c) for c in train.labels))
    if len(classes) < 2:
        raise UsageError("need at least two classes")
    pairs: list[BinarySvm] = []
    for ai in range(len(classes)):
        for bi in range(ai + 1, len(classes)):
            c_neg, c_pos = classes[ai], classes[bi]
            sel = (train.labels == c_neg) | (train.labels == c_pos)
            x = train.rows[sel]
            y = np.where(train.labels[sel] == c_pos, 1.0, -1.0)
            K = rbf_kernel(x, x, gamma)
            alphas, b, trace = _smo_train(K, y, C, tol, max_passes, max_iter)
            sv = alphas > 1e-9
            pairs.append(
                BinarySvm(
                    class_neg=c_neg,
                    class_pos=c_pos,
                    support_x=x[sv],
                    dual_coef=(alphas * y)[sv],
                    bias=b,
                    gamma=gamma,
                    alphas=alphas,
                    train_y=y,
                    objective_trace=trace,
                )
            )
    return SvmModel(pairs=pairs, classes=classes, C=C, gamma=gamma)


def svm_predict(model: SvmModel, rows) -> np.ndarray:
    """One-vs-one vote; vote ties pick the tied class with the smallest
    summed |decision| over its pairs, then the lowest class id."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = len(rows)
    n_cls = len(model.classes)
    index = {c: k for k, c in enumerate(model.classes)}
    votes = np.zeros((n, n_cls), dtype=int)
    margin = np.zeros((n, n_cls))
    for pair in model.pairs:
        dec = pair.decision(rows)
        pos = index[pair.class_pos]
        neg = index[pair.class_neg]
        winners = np.where(dec >= 0, pos, neg)
        for target in (pos, neg):
            hit = winners == target
            votes[hit, target] += 1
        margin[:, pos] += np.abs(dec)
        margin[:, neg] += np.abs(dec)
    out = np.empty(n, dtype=int)
    for i in range(n):
        best = votes[i].max()
        tied = np.flatnonzero(votes[i] == best)
        pick = tied[int(np.argmin(margin[i, tied]))]
        out[i] = model.classes[pick]
    return out

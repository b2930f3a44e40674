"""Linear regression family: OLS, ridge, lasso and elastic net.

The penalised objectives are, without any per-sample scaling::

    ols:     ||Xw - y||^2
    ridge:   ||Xw - y||^2 + z ||w||^2
    lasso:   ||Xw - y||^2 + z ||w||_1
    enet:    ||Xw - y||^2 + z1 ||w||_1 + z2 ||w||^2

Ridge has a closed form; lasso and elastic net run cyclic coordinate
descent with soft thresholding (ridge can as well, for cross-checking).
The intercept is always fit on centred data and never penalised.
`elastic_net_fit` offers the per-sample parametrisation (penalty strength
relative to (1/2n) of the squared loss) that standard solvers use, which
is how sparse coefficient patterns appear at moderate strengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from ..dataset import fmt_float
from ..errors import NumericError, UsageError

PENALTIES = ("none", "ridge", "lasso", "elasticnet")


@dataclass
class LinearFamilyModel:
    weights: np.ndarray  # on the expanded feature columns
    intercept: float
    penalty: str
    z1: float  # L1 strength
    z2: float  # L2 strength
    degree: int = 1


@dataclass(frozen=True)
class ErrorModel:
    """Gaze-error predictor: error = b0 + b1*gaze + b2*yaw + b3*pitch."""

    condition: str
    intercept: float
    coefficients: tuple[float, float, float]


def poly_expand(x: np.ndarray, degree: int) -> np.ndarray:
    """All monomials of the columns up to the given total degree (no bias)."""
    if degree < 1:
        raise UsageError("degree must be >= 1")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if degree == 1:
        return x
    cols = [x[:, j] for j in range(x.shape[1])]
    out = list(cols)
    for deg in range(2, degree + 1):
        for combo in combinations_with_replacement(range(x.shape[1]), deg):
            term = np.ones(len(x))
            for j in combo:
                term = term * cols[j]
            out.append(term)
    return np.column_stack(out)


def _soft(v: float, threshold: float) -> float:
    if v > threshold:
        return v - threshold
    if v < -threshold:
        return v + threshold
    return 0.0


def _coordinate_descent(x, y, z1, z2, tol, max_iter):
    n, d = x.shape
    col_sq = (x**2).sum(axis=0)
    w = np.zeros(d)
    residual = y.copy()
    for _ in range(max_iter):
        max_delta = 0.0
        for j in range(d):
            if col_sq[j] == 0:
                continue
            rho = x[:, j] @ residual + col_sq[j] * w[j]
            new_w = _soft(rho, z1 / 2.0) / (col_sq[j] + z2)
            delta = new_w - w[j]
            if delta != 0.0:
                residual -= delta * x[:, j]
                w[j] = new_w
                max_delta = max(max_delta, abs(delta))
        if max_delta < tol:
            return w
    raise NumericError(f"coordinate descent did not converge in {max_iter} sweeps")


def linear_fit(
    x,
    y,
    penalty: str = "none",
    z: float = 0.0,
    z1: float | None = None,
    z2: float | None = None,
    degree: int = 1,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    solver: str = "auto",
) -> LinearFamilyModel:
    """Fit one member of the family on (optionally expanded) features.

    ``z`` is the single penalty strength for ridge or lasso; elastic net
    takes ``z1`` and ``z2`` explicitly.  ``solver="cd"`` forces coordinate
    descent even where a closed form exists.
    """
    if penalty not in PENALTIES:
        raise UsageError(f"unknown penalty {penalty!r}")
    x = poly_expand(np.atleast_2d(np.asarray(x, dtype=float)), degree)
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise UsageError("x and y must have equal length")
    x_mean = x.mean(axis=0)
    y_mean = float(y.mean())
    xc = x - x_mean
    yc = y - y_mean

    if penalty == "none":
        l1, l2 = 0.0, 0.0
    elif penalty == "ridge":
        l1, l2 = 0.0, z
    elif penalty == "lasso":
        l1, l2 = z, 0.0
    else:
        if z1 is None or z2 is None:
            raise UsageError("elasticnet needs explicit z1 and z2")
        l1, l2 = z1, z2

    use_cd = solver == "cd" or l1 > 0
    if solver not in ("auto", "cd", "closed"):
        raise UsageError("solver must be auto, cd or closed")
    if use_cd:
        w = _coordinate_descent(xc, yc, l1, l2, tol, max_iter)
    else:
        gram = xc.T @ xc + l2 * np.eye(x.shape[1])
        if penalty == "none":
            cond = np.linalg.cond(gram)
            if not np.isfinite(cond) or cond > 1e12:
                raise NumericError(
                    "singular or ill-conditioned design matrix; consider penalty='ridge'"
                )
        try:
            w = np.linalg.solve(gram, xc.T @ yc)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"normal equations failed ({exc}); consider ridge") from None

    intercept = y_mean - float(w @ x_mean)
    return LinearFamilyModel(
        weights=w, intercept=intercept, penalty=penalty, z1=l1, z2=l2, degree=degree
    )


def elastic_net_fit(x, y, alpha: float = 0.5, mix: float = 0.5,
                    degree: int = 1, tol: float = 1e-8) -> LinearFamilyModel:
    """Elastic net in the per-sample convention.

    Minimises (1/2n)||Xw - y||^2 + alpha * (mix ||w||_1 + (1-mix)/2 ||w||^2),
    by mapping onto the raw objective with z1 = 2 n alpha mix and
    z2 = n alpha (1 - mix).
    """
    if not (0 <= mix <= 1):
        raise UsageError("mix must be in [0, 1]")
    if alpha < 0:
        raise UsageError("alpha must be non-negative")
    n = len(np.atleast_2d(np.asarray(x)))
    return linear_fit(
        x, y, penalty="elasticnet",
        z1=2.0 * n * alpha * mix, z2=n * alpha * (1.0 - mix),
        degree=degree, tol=tol,
    )


def linear_predict(model: LinearFamilyModel, x) -> np.ndarray:
    x = poly_expand(np.atleast_2d(np.asarray(x, dtype=float)), model.degree)
    if x.shape[1] != len(model.weights):
        raise UsageError(
            f"model expects {len(model.weights)} expanded features, got {x.shape[1]}"
        )
    return x @ model.weights + model.intercept


def rmse(pred, truth) -> float:
    """Root mean squared error between two equal-length vectors."""
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.size != truth.size:
        raise UsageError("pred and truth must have equal length")
    if pred.size == 0:
        raise UsageError("rmse needs at least one value")
    return float(np.sqrt(((pred - truth) ** 2).mean()))


def export_error_model(model: LinearFamilyModel, condition: str) -> ErrorModel:
    """Package a 3-predictor fit (gaze, yaw, pitch angles) for reporting."""
    if model.degree != 1 or len(model.weights) != 3:
        raise UsageError(
            "error models take exactly the three angle predictors at degree 1"
        )
    return ErrorModel(
        condition=condition,
        intercept=model.intercept,
        coefficients=tuple(float(v) for v in model.weights),
    )


def write_error_model_csv(path: str | Path, models: list[ErrorModel],
                          rmse_by_condition: dict[str, float] | None = None) -> None:
    """Coefficient table: one row per condition, B1..B3 then the intercept."""
    cols = "condition,b1,b2,b3,intercept"
    if rmse_by_condition is not None:
        cols += ",rmse"
    lines = [cols]
    for m in models:
        row = (
            f"{m.condition},{fmt_float(m.coefficients[0])},{fmt_float(m.coefficients[1])},"
            f"{fmt_float(m.coefficients[2])},{fmt_float(m.intercept)}"
        )
        if rmse_by_condition is not None:
            row += f",{fmt_float(rmse_by_condition[m.condition])}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

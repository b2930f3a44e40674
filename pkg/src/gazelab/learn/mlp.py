"""Multilayer perceptron trained by backpropagation with Adam.

ReLU hidden layers; the output layer is softmax with cross-entropy loss for
classification or linear with squared error for regression.  An L2 penalty
on the weight matrices (not biases) is part of the objective, so the
analytic gradients checked against finite differences include it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError, UsageError
from ..features import LabeledMatrix

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class MlpModel:
    layer_sizes: list[int]  # input, hidden..., output
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    task: str  # "classify" | "regress"
    l2_alpha: float
    classes: list[int] = field(default_factory=list)

    def forward(self, x: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Hidden activations and the raw output (pre-softmax for classify)."""
        a = np.atleast_2d(np.asarray(x, dtype=float))
        hidden = [a]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.maximum(a @ w + b, 0.0)
            hidden.append(a)
        out = a @ self.weights[-1] + self.biases[-1]
        return hidden, out

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray):
        """Objective value and gradients for one batch.

        y holds integer labels for classification, targets (n, out) for
        regression.  The objective is the mean data loss plus
        l2_alpha * sum of squared weights.
        """
        hidden, out = self.forward(x)
        n = len(out)
        if self.task == "classify":
            shifted = out - out.max(axis=1, keepdims=True)
            exp = np.exp(shifted)
            probs = exp / exp.sum(axis=1, keepdims=True)
            data_loss = float(-np.log(probs[np.arange(n), y] + 1e-300).mean())
            delta = probs
            delta[np.arange(n), y] -= 1.0
            delta /= n
        else:
            target = np.atleast_2d(np.asarray(y, dtype=float))
            if target.shape[0] != n:
                target = target.T
            diff = out - target
            data_loss = float((diff**2).mean())
            delta = 2.0 * diff / diff.size

        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for layer in range(len(self.weights) - 1, -1, -1):
            grads_w[layer] = hidden[layer].T @ delta + 2.0 * self.l2_alpha * self.weights[layer]
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * (hidden[layer] > 0)
        penalty = self.l2_alpha * sum(float((w**2).sum()) for w in self.weights)
        return data_loss + penalty, grads_w, grads_b


def _init_params(sizes: list[int], rng: np.random.Generator):
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def mlp_fit(
    train: LabeledMatrix,
    hidden_layers: tuple[int, ...] = (50, 100, 50),
    l2_alpha: float = 1e-3,
    epochs: int = 300,
    seed: int = 0,
    batch_size: int = 32,
    learning_rate: float = 1e-3,
    task: str = "classify",
    targets: np.ndarray | None = None,
) -> MlpModel:
    """Train on mini-batches with Adam; deterministic for a fixed seed.

    For regression pass ``task="regress"`` and the target vector via
    ``targets`` (labels are ignored then).
    """
    if not hidden_layers:
        raise UsageError("need at least one hidden layer")
    if task not in ("classify", "regress"):
        raise UsageError("task must be 'classify' or 'regress'")
    x = train.rows
    if task == "classify":
        y = train.labels
        n_out = train.n_classes
    else:
        if targets is None:
            raise UsageError("regression training needs targets")
        y = np.atleast_2d(np.asarray(targets, dtype=float))
        if y.shape[0] != len(x):
            y = y.T
        n_out = y.shape[1]

    sizes = [x.shape[1], *hidden_layers, n_out]
    rng = np.random.default_rng(seed)
    weights, biases = _init_params(sizes, rng)
    model = MlpModel(
        layer_sizes=sizes,
        weights=weights,
        biases=biases,
        task=task,
        l2_alpha=l2_alpha,
        classes=list(range(n_out)) if task == "classify" else [],
    )

    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    t = 0
    n = len(x)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            loss, grads_w, grads_b = model.loss_and_grads(x[batch], y[batch])
            if not np.isfinite(loss):
                raise TrainingError(
                    "MLP loss became non-finite; lower the learning rate or "
                    "standardize the inputs"
                )
            t += 1
            for params, grads, ms, vs in (
                (model.weights, grads_w, m_w, v_w),
                (model.biases, grads_b, m_b, v_b),
            ):
                for k in range(len(params)):
                    ms[k] = ADAM_BETA1 * ms[k] + (1 - ADAM_BETA1) * grads[k]
                    vs[k] = ADAM_BETA2 * vs[k] + (1 - ADAM_BETA2) * grads[k] ** 2
                    m_hat = ms[k] / (1.0 - ADAM_BETA1**t)
                    v_hat = vs[k] / (1.0 - ADAM_BETA2**t)
                    params[k] -= learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return model


def mlp_predict(model: MlpModel, rows) -> np.ndarray:
    """Class labels (argmax) for classifiers, raw outputs for regressors."""
    _, out = model.forward(rows)
    if model.task == "classify":
        return out.argmax(axis=1)
    return out[:, 0] if out.shape[1] == 1 else out

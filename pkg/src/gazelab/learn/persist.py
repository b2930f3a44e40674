"""Flat text persistence for trained models.

Format: a version line, ``key=value`` header entries, then named blocks of
whitespace-separated numbers.  Floats are written with repr, so reloaded
models predict bit-identically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import GazeDataError, UsageError
from .forest import ForestModel, TreeNode
from .knn import KnnModel
from .linear import LinearFamilyModel
from .mlp import MlpModel
from .svm import BinarySvm, SvmModel

_MAGIC = "# gazelab-model v1"


def _emit_array(lines: list[str], name: str, arr: np.ndarray) -> None:
    arr = np.asarray(arr)
    lines.append(f"[{name}] {' '.join(str(s) for s in arr.shape)}")
    flat = arr.ravel()
    if arr.dtype.kind in "iu":
        body = " ".join(str(int(v)) for v in flat)
    else:
        body = " ".join(repr(float(v)) for v in flat)
    lines.append(body if len(flat) else "")


class _Reader:
    def __init__(self, lines: list[str]):
        self.lines = lines
        self.pos = 0
        self.header: dict[str, str] = {}

    def read_header(self):
        while self.pos < len(self.lines) and "=" in self.lines[self.pos] and not self.lines[self.pos].startswith("["):
            key, value = self.lines[self.pos].split("=", 1)
            self.header[key] = value
            self.pos += 1

    def read_array(self, name: str, dtype=float) -> np.ndarray:
        tag = self.lines[self.pos]
        if not tag.startswith(f"[{name}]"):
            raise GazeDataError(f"model file: expected block [{name}], found {tag!r}")
        shape = tuple(int(v) for v in tag.split("]", 1)[1].split())
        body = self.lines[self.pos + 1]
        self.pos += 2
        values = np.array([dtype(v) for v in body.split()], dtype=dtype)
        return values.reshape(shape)


def _tree_to_rows(node: TreeNode, rows: list[tuple]) -> int:
    """Flatten a tree; children are appended after their parent, and the
    parent row stores their indices."""
    idx = len(rows)
    rows.append(None)
    if node.feature < 0:
        rows[idx] = (-1, 0.0, -1, -1, node.label)
    else:
        left = _tree_to_rows(node.left, rows)
        right = _tree_to_rows(node.right, rows)
        rows[idx] = (node.feature, node.threshold, left, right, node.label)
    return idx


def _tree_from_rows(rows: np.ndarray, idx: int = 0) -> TreeNode:
    feature, threshold, left, right, label = rows[idx]
    if int(feature) < 0:
        return TreeNode(label=int(label))
    return TreeNode(
        feature=int(feature),
        threshold=float(threshold),
        left=_tree_from_rows(rows, int(left)),
        right=_tree_from_rows(rows, int(right)),
        label=int(label),
    )


def save_model(model, path: str | Path) -> None:
    lines = [_MAGIC]
    if isinstance(model, KnnModel):
        lines += [f"kind=knn", f"k={model.k}", f"n_classes={model.n_classes}"]
        _emit_array(lines, "train_rows", model.train_rows)
        _emit_array(lines, "train_labels", model.train_labels)
    elif isinstance(model, SvmModel):
        lines += [
            "kind=svm",
            f"classes={','.join(str(c) for c in model.classes)}",
            f"C={repr(float(model.C))}",
            f"gamma={repr(float(model.gamma))}",
            f"n_pairs={len(model.pairs)}",
        ]
        # all key=value lines must precede the first block
        for i, pair in enumerate(model.pairs):
            lines.append(f"pair_{i}={pair.class_neg},{pair.class_pos},{repr(float(pair.bias))}")
        for i, pair in enumerate(model.pairs):
            _emit_array(lines, f"support_x_{i}", pair.support_x)
            _emit_array(lines, f"dual_coef_{i}", pair.dual_coef)
    elif isinstance(model, MlpModel):
        lines += [
            "kind=mlp",
            f"layer_sizes={','.join(str(s) for s in model.layer_sizes)}",
            f"task={model.task}",
            f"l2_alpha={repr(float(model.l2_alpha))}",
            f"classes={','.join(str(c) for c in model.classes)}",
        ]
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            _emit_array(lines, f"w_{i}", w)
            _emit_array(lines, f"b_{i}", b)
    elif isinstance(model, ForestModel):
        lines += [
            "kind=forest",
            f"n_classes={model.n_classes}",
            f"max_depth={model.max_depth}",
            f"n_trees={len(model.trees)}",
        ]
        _emit_array(lines, "importances", model.importances)
        for i, tree in enumerate(model.trees):
            rows: list[tuple] = []
            _tree_to_rows(tree, rows)
            _emit_array(lines, f"tree_{i}", np.array(rows, dtype=float))
    elif isinstance(model, LinearFamilyModel):
        lines += [
            "kind=linear",
            f"penalty={model.penalty}",
            f"z1={repr(float(model.z1))}",
            f"z2={repr(float(model.z2))}",
            f"degree={model.degree}",
            f"intercept={repr(float(model.intercept))}",
        ]
        _emit_array(lines, "weights", model.weights)
    else:
        raise UsageError(f"cannot persist model of type {type(model).__name__}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path):
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0] != _MAGIC:
        raise GazeDataError(f"{path}: not a gazelab model file")
    reader = _Reader(text[1:])
    reader.read_header()
    kind = reader.header.get("kind")
    if kind == "knn":
        return KnnModel(
            train_rows=reader.read_array("train_rows"),
            train_labels=reader.read_array("train_labels", int),
            k=int(reader.header["k"]),
            n_classes=int(reader.header["n_classes"]),
        )
    if kind == "svm":
        classes = [int(c) for c in reader.header["classes"].split(",")]
        n_pairs = int(reader.header["n_pairs"])
        pairs = []
        gamma = float(reader.header["gamma"])
        for i in range(n_pairs):
            neg, pos, bias = reader.header[f"pair_{i}"].split(",")
            pairs.append(
                BinarySvm(
                    class_neg=int(neg),
                    class_pos=int(pos),
                    support_x=reader.read_array(f"support_x_{i}"),
                    dual_coef=reader.read_array(f"dual_coef_{i}"),
                    bias=float(bias),
                    gamma=gamma,
                )
            )
        return SvmModel(pairs=pairs, classes=classes,
                        C=float(reader.header["C"]), gamma=gamma)
    if kind == "mlp":
        sizes = [int(s) for s in reader.header["layer_sizes"].split(",")]
        weights, biases = [], []
        for i in range(len(sizes) - 1):
            weights.append(reader.read_array(f"w_{i}"))
            biases.append(reader.read_array(f"b_{i}"))
        classes_raw = reader.header["classes"]
        return MlpModel(
            layer_sizes=sizes,
            weights=weights,
            biases=biases,
            task=reader.header["task"],
            l2_alpha=float(reader.header["l2_alpha"]),
            classes=[int(c) for c in classes_raw.split(",")] if classes_raw else [],
        )
    if kind == "forest":
        importances = reader.read_array("importances")
        trees = [
            _tree_from_rows(reader.read_array(f"tree_{i}"))
            for i in range(int(reader.header["n_trees"]))
        ]
        return ForestModel(
            trees=trees,
            importances=importances,
            n_classes=int(reader.header["n_classes"]),
            max_depth=int(reader.header["max_depth"]),
        )
    if kind == "linear":
        return LinearFamilyModel(
            weights=reader.read_array("weights"),
            intercept=float(reader.header["intercept"]),
            penalty=reader.header["penalty"],
            z1=float(reader.header["z1"]),
            z2=float(reader.header["z2"]),
            degree=int(reader.header["degree"]),
        )
    raise GazeDataError(f"{path}: unknown model kind {kind!r}")

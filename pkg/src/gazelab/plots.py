"""SVG figure emission for the command line (all plots are optional).

matplotlib is imported lazily and configured for reproducible output:
fixed hash salt, no embedded creation date, Agg backend.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "gazelab"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path):
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    import matplotlib.pyplot as plt

    plt.close(fig)


def plot_kde(curves, path, title="Error density"):
    """Overlay KDE curves; ``curves`` is [(name, KdeCurve), ...]."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, curve in curves:
        ax.plot(curve.eval_points, curve.densities, label=name)
    ax.set_xlabel("gaze error (deg)")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_spatial_map(smap, path, title="Spatial error map"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(smap.values, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(smap.yaw_bins_deg)))
    ax.set_xticklabels([f"{v:.1f}" for v in smap.yaw_bins_deg])
    ax.set_yticks(range(len(smap.pitch_bins_deg)))
    ax.set_yticklabels([f"{v:.1f}" for v in smap.pitch_bins_deg])
    ax.set_xlabel("target yaw (deg)")
    ax.set_ylabel("target pitch (deg)")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="mean |error| (deg)")
    _save(fig, path)


def plot_tsne(coords, labels, class_names, path, title="t-SNE embedding"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 5))
    labels = np.asarray(labels)
    for c, name in enumerate(class_names):
        sel = labels == c
        ax.scatter(coords[sel, 0], coords[sel, 1], s=6, label=name)
    ax.set_title(title)
    ax.legend(fontsize=7, markerscale=2)
    _save(fig, path)


def plot_confusion(cm, path, title="Confusion matrix"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.imshow(cm.counts, cmap="Blues")
    for i in range(len(cm.class_names)):
        for j in range(len(cm.class_names)):
            ax.text(j, i, str(cm.counts[i, j]), ha="center", va="center", fontsize=8)
    ax.set_xticks(range(len(cm.class_names)))
    ax.set_xticklabels(cm.class_names, rotation=45, ha="right", fontsize=7)
    ax.set_yticks(range(len(cm.class_names)))
    ax.set_yticklabels(cm.class_names, fontsize=7)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    _save(fig, path)


def plot_learning_curve(lc, path, title="Learning curve"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lc.train_sizes, lc.train_scores, marker="o", label="train")
    ax.plot(lc.train_sizes, lc.cv_scores, marker="s", label="cross-validation")
    ax.set_xlabel("training samples")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_actual_vs_predicted(actual, predicted, path, title="Predicted gaze error"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.asarray(actual), color="tab:red", lw=0.8, label="actual")
    ax.plot(np.asarray(predicted), color="tab:blue", lw=0.8, label="predicted")
    ax.set_xlabel("sample")
    ax.set_ylabel("gaze error (deg)")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_series_variants(original, variants, path, title="Augmentation variants"):
    """Original series in blue behind each variant in red, one panel per tag."""
    plt = _plt()
    n = len(variants)
    cols = 2
    rows_n = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows_n, cols, figsize=(9, 2.2 * rows_n), squeeze=False)
    for k, (tag, values) in enumerate(variants):
        ax = axes[k // cols][k % cols]
        ax.plot(original, color="tab:blue", lw=0.7)
        ax.plot(values, color="tab:red", lw=0.7)
        ax.set_title(tag, fontsize=8)
    for k in range(n, rows_n * cols):
        axes[k // cols][k % cols].axis("off")
    fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)

"""Feature assembly, ranking features with a random forest, and t-SNE."""

import numpy as np

from gazelab import assemble_dataset, standardize, tsne
from gazelab.features import FEATURE_NAMES
from gazelab.learn import forest_importance
from gazelab.synth import synth_task_sessions

# --- labelled matrix for the four-distance task ----------------------------
sessions = synth_task_sessions("user_distance", participants=6, seed=4,
                               samples_per_aoi=12)
matrix = assemble_dataset(sessions, "user_distance", augment=True, seed=0, kernel_w=11)
print(f"{len(matrix)} samples x {matrix.rows.shape[1]} features, "
      f"classes {matrix.class_names}")

# --- which features carry the signal? ---------------------------------------
importance = forest_importance(matrix, n_estimators=100, max_depth=8, seed=0)
ranked = sorted(zip(FEATURE_NAMES, importance), key=lambda kv: -kv[1])
print("top features by impurity decrease:")
for name, value in ranked[:6]:
    print(f"  {name:<8} {value:.3f}")
print(f"summary statistics hold {importance[15:].sum():.0%} of the importance")

# --- embed the standardized matrix in 2-D -----------------------------------
std = standardize(matrix)
result = tsne(std, perplexity=40.0, seed=0, n_iter=500)
print(f"KL divergence {result.kl_trace[0]:.2f} -> {result.kl_trace[-1]:.2f}")

# class separation in the embedding, nearest-centroid style
coords = result.coords
centroids = np.array([coords[matrix.labels == c].mean(axis=0)
                      for c in range(matrix.n_classes)])
nearest = np.argmin(
    ((coords[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2), axis=1
)
print(f"nearest-centroid agreement in 2-D: {np.mean(nearest == matrix.labels):.0%}")

"""Identifying the operating condition behind gaze errors.

Cross-validates the three classifier families on a synthetic head-pose
task, prints the confusion matrix and detection rates, and sketches a
learning curve.
"""

from gazelab import ModelSpec, assemble_dataset, classification_report, kfold_cv
from gazelab.evaluate import grid_search, learning_curve
from gazelab.synth import synth_task_sessions

sessions = synth_task_sessions("head_pose", participants=6, seed=5, samples_per_aoi=12)
matrix = assemble_dataset(sessions, "head_pose", augment=True, seed=1, kernel_w=11)
print(f"{len(matrix)} samples, classes {matrix.class_names}\n")

# --- three families under identical 5-fold CV -------------------------------
specs = {
    "knn": ModelSpec("knn", {"k": 3}),
    "svm": ModelSpec("svm", {"C": 10.0, "gamma": 1.0}),
    "mlp": ModelSpec("mlp", {"hidden_layers": (50, 100, 50), "l2_alpha": 1e-3,
                             "epochs": 40}),
}
results = {}
for name, spec in specs.items():
    results[name] = kfold_cv(matrix, spec, k_folds=5, seed=0)
    print(f"{name}: CV accuracy {results[name].mean_accuracy:.3f}")

# --- confusion matrix and rates for the best family -------------------------
best = max(results, key=lambda n: results[n].mean_accuracy)
cm, rates = classification_report(
    matrix.labels, results[best].pooled_predictions, matrix.n_classes, matrix.class_names
)
print(f"\n{best} pooled out-of-fold confusion matrix:")
print(cm.counts)
print(f"TPR {rates.tpr:.2f}  FPR {rates.fpr:.2f}  TNR {rates.tnr:.2f}  "
      f"FNR {rates.fnr:.2f}  precision {rates.precision:.2f}")

# --- hyperparameter search ---------------------------------------------------
search = grid_search(matrix, "knn", {"k": [1, 3, 5, 7, 9]}, k_folds=5, seed=0)
print(f"\nbest k from the grid: {search.best_params['k']}")

# --- does more data still help? ----------------------------------------------
lc = learning_curve(matrix, specs["knn"], sizes=[120, 240, 480], k_folds=4, seed=0)
for size, tr, cv in zip(lc.train_sizes, lc.train_scores, lc.cv_scores):
    print(f"  n={size:>4}  train {tr:.2f}  cv {cv:.2f}")
gap = abs(lc.cv_scores[-1] - lc.cv_scores[-2])
print(f"curve flattens: |last - previous| = {gap:.3f}")

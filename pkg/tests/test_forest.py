import numpy as np
import pytest

from gazelab.errors import UsageError
from gazelab.features import LabeledMatrix
from gazelab.learn import forest_fit, forest_importance, forest_predict


def label_copy_dataset(seed=0, n=300, d=6):
    """Feature 0 is a noisy copy of the label; the rest is uniform noise."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, n)
    rows = rng.uniform(-1, 1, (n, d))
    rows[:, 0] = labels + rng.normal(0, 0.05, n)
    return LabeledMatrix.from_arrays(rows, labels)


def test_importances_sum_to_one():
    imp = forest_importance(label_copy_dataset(), n_estimators=30, max_depth=4, seed=0)
    assert imp.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(imp >= 0)


def test_label_copy_feature_dominates():
    imp = forest_importance(label_copy_dataset(), n_estimators=50, max_depth=6, seed=1)
    assert imp[0] > 0.8


def test_constant_feature_near_zero():
    m = label_copy_dataset(seed=2)
    rows = m.rows.copy()
    rows[:, 3] = 5.0
    m2 = LabeledMatrix.from_arrays(rows, m.labels)
    imp = forest_importance(m2, n_estimators=40, max_depth=6, seed=2)
    assert imp[3] < 0.01


def test_permuting_a_feature_hits_mostly_that_feature():
    m = label_copy_dataset(seed=3)
    base = forest_importance(m, n_estimators=60, max_depth=6, seed=4)
    rng = np.random.default_rng(5)
    rows = m.rows.copy()
    rows[:, 0] = rows[rng.permutation(len(rows)), 0]
    permuted = forest_importance(
        LabeledMatrix.from_arrays(rows, m.labels), n_estimators=60, max_depth=6, seed=4
    )
    drop = base - permuted
    assert abs(drop[0]) > 5 * np.abs(np.delete(drop, 0)).max() / 2


def test_forest_predicts_separable_data():
    m = label_copy_dataset(seed=6)
    model = forest_fit(m, n_estimators=30, max_depth=6, seed=7)
    pred = forest_predict(model, m.rows)
    assert np.mean(pred == m.labels) > 0.97


def test_deterministic_per_seed():
    m = label_copy_dataset(seed=8)
    a = forest_importance(m, n_estimators=20, max_depth=5, seed=9)
    b = forest_importance(m, n_estimators=20, max_depth=5, seed=9)
    assert np.array_equal(a, b)


def test_single_class_rejected():
    m = LabeledMatrix.from_arrays(np.zeros((5, 2)), [0] * 5)
    with pytest.raises(UsageError):
        forest_fit(m)

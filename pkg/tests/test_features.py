import numpy as np
import pytest

from gazelab.analysis import describe
from gazelab.augment import augment_sample
from gazelab.errors import GazeDataError, NumericError, UsageError
from gazelab.features import (
    FEATURE_NAMES,
    LabeledMatrix,
    apply_standardization,
    assemble_dataset,
    build_feature,
    destandardize,
    read_matrix_csv,
    shuffle_split,
    standardize,
    write_matrix_csv,
)
from gazelab.geometry import ErrorSeries
from gazelab.synth import synth_task_sessions


def make_series(values, aois=None):
    values = np.asarray(values, dtype=float)
    n = len(values)
    if aois is None:
        aois = np.repeat(np.arange(1, 16), int(np.ceil(n / 15)))[:n]
    return ErrorSeries(values, values, values, np.asarray(aois), np.arange(n) * 33)


class TestBuildFeature:
    def test_constant_series(self):
        fv = build_feature(make_series(np.ones(60)), "frontal")
        arr = fv.as_array()
        assert arr.shape == (20,)
        assert np.allclose(arr[:15], 1.0)
        assert fv.mean == pytest.approx(1.0)
        assert fv.sd == pytest.approx(0.0)
        assert fv.iqr == pytest.approx(0.0)
        assert fv.ci95_low == pytest.approx(1.0) and fv.ci95_high == pytest.approx(1.0)

    def test_single_hot_aoi(self):
        aois = np.repeat(np.arange(1, 16), 4)
        values = np.zeros(60)
        values[aois == 3] = 2.0
        fv = build_feature(make_series(values, aois), "frontal")
        assert fv.aoi_err[2] == pytest.approx(2.0)
        assert np.count_nonzero(fv.aoi_err) == 1

    def test_stats_match_describe(self):
        rng = np.random.default_rng(4)
        series = make_series(rng.normal(2, 1, 90))
        fv = build_feature(series, "frontal")
        st = describe(np.abs(series.frontal_err))
        assert fv.mean == pytest.approx(st.mean, abs=1e-12)
        assert fv.iqr == pytest.approx(st.iqr, abs=1e-12)
        assert fv.ci95_low == pytest.approx(st.ci95_low, abs=1e-12)
        assert fv.ci95_high == pytest.approx(st.ci95_high, abs=1e-12)

    def test_order_within_aoi_irrelevant(self):
        rng = np.random.default_rng(5)
        aois = np.repeat(np.arange(1, 16), 6)
        values = rng.normal(0, 1, 90)
        fv1 = build_feature(make_series(values, aois), "frontal")
        # shuffle inside each AOI block
        shuffled = values.copy()
        for k in range(1, 16):
            sel = np.flatnonzero(aois == k)
            shuffled[sel] = shuffled[sel][rng.permutation(len(sel))]
        fv2 = build_feature(make_series(shuffled, aois), "frontal")
        assert np.allclose(fv1.aoi_err, fv2.aoi_err, atol=1e-12)
        assert fv1.mean == pytest.approx(fv2.mean, abs=1e-12)

    def test_empty_aoi_raises(self):
        aois = np.repeat(np.arange(1, 15), 5)
        with pytest.raises(GazeDataError, match="AOI 15"):
            build_feature(make_series(np.ones(70), aois), "frontal")

    def test_flip_variant_features(self):
        rng = np.random.default_rng(6)
        series = make_series(rng.normal(2, 1, 90))
        augmented = augment_sample(series, seed=0)
        tag, payload = augmented.variants[8]
        assert tag == "hflip"
        fv = build_feature(payload, "frontal")
        base = build_feature(series, "frontal")
        assert sorted(fv.aoi_err) == pytest.approx(sorted(base.aoi_err))
        assert fv.mean == pytest.approx(base.mean, abs=1e-12)
        assert fv.sd == pytest.approx(base.sd, abs=1e-12)


@pytest.fixture(scope="module")
def sessions():
    return synth_task_sessions("user_distance", participants=2, seed=3,
                               samples_per_aoi=6)


class TestAssembleDataset:

    def test_augmented_row_count(self, sessions):
        m = assemble_dataset(sessions, "user_distance", augment=True, seed=0, kernel_w=5)
        # participants x variants x categories x classes = 2*10*3*4
        assert len(m) == 240
        assert m.rows.shape == (240, 20)
        assert m.class_names == ["UD50", "UD60", "UD70", "UD80"]
        assert sorted(np.bincount(m.labels)) == [60, 60, 60, 60]

    def test_unaugmented_three_rows_per_session(self, sessions):
        one = [s for s in sessions if s.meta.participant_id == "P01"]
        m = assemble_dataset(one, "user_distance", augment=False, seed=0, kernel_w=5)
        assert len(m) == 12  # 4 sessions x 3 categories
        assert m.categories[:3] == ["frontal", "yaw", "pitch"]

    def test_reduced_feature_set(self, sessions):
        m = assemble_dataset(sessions, "user_distance", augment=False, seed=0,
                             kernel_w=5, reduced=True)
        assert m.rows.shape[1] == 5
        assert m.feature_names == ("mean", "sd", "ci_lo", "ci_hi", "iqr")

    def test_mixed_rejects_duplicate_neutral(self):
        sessions = synth_task_sessions("mixed", participants=1, seed=0, samples_per_aoi=6)
        extra = synth_task_sessions("head_pose", participants=1, seed=1, samples_per_aoi=6)
        neutral = [s for s in extra if s.meta.condition == "Neutral"]
        with pytest.raises(GazeDataError, match="P01"):
            assemble_dataset(sessions + neutral, "mixed", augment=False, kernel_w=5)

    def test_mixed_has_seven_classes(self):
        sessions = synth_task_sessions("mixed", participants=1, seed=0, samples_per_aoi=6)
        m = assemble_dataset(sessions, "mixed", augment=False, kernel_w=5)
        assert m.n_classes == 7
        assert len(m) == 21

    def test_missing_class_raises(self, sessions):
        ud50_only = [s for s in sessions if s.meta.condition == "UD50"]
        with pytest.raises(GazeDataError, match="UD60"):
            assemble_dataset(ud50_only, "user_distance", augment=False, kernel_w=5)


class TestStandardize:
    def test_column_oracle(self):
        m = LabeledMatrix.from_arrays(np.array([[1.0], [2.0], [3.0]]), [0, 0, 1])
        std = standardize(m)
        assert np.allclose(std.rows[:, 0], [-1.2247448713915890, 0.0, 1.2247448713915890])

    def test_zero_mean_unit_sd(self):
        rng = np.random.default_rng(0)
        m = LabeledMatrix.from_arrays(rng.normal(3, 2, (40, 6)), rng.integers(0, 2, 40))
        std = standardize(m)
        assert np.all(np.abs(std.rows.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(std.rows.std(axis=0) - 1) < 1e-9)

    def test_idempotent_within_tolerance(self):
        rng = np.random.default_rng(1)
        m = LabeledMatrix.from_arrays(rng.normal(0, 5, (30, 3)), rng.integers(0, 2, 30))
        once = standardize(m)
        twice = standardize(once)
        assert np.allclose(twice.rows, once.rows, atol=1e-12)

    def test_round_trip_destandardize(self):
        rng = np.random.default_rng(2)
        m = LabeledMatrix.from_arrays(rng.normal(5, 3, (25, 4)), rng.integers(0, 2, 25))
        std = standardize(m)
        back = destandardize(std.rows, std.column_mean, std.column_sd)
        assert np.allclose(back, m.rows, atol=1e-12)

    def test_params_apply_to_test_rows(self):
        rng = np.random.default_rng(3)
        m = LabeledMatrix.from_arrays(rng.normal(0, 1, (30, 3)), rng.integers(0, 2, 30))
        std = standardize(m)
        test = rng.normal(0, 1, (5, 3))
        transformed = apply_standardization(test, std.column_mean, std.column_sd)
        assert np.allclose(transformed, (test - std.column_mean) / std.column_sd)

    def test_zero_variance_column_named(self):
        rows = np.column_stack([np.ones(10), np.arange(10.0)])
        m = LabeledMatrix.from_arrays(rows, np.zeros(10, dtype=int),
                                      feature_names=("const", "ramp"))
        with pytest.raises(NumericError, match="const"):
            standardize(m)


class TestShuffleSplit:
    def _matrix(self, n=100, classes=2):
        rng = np.random.default_rng(0)
        return LabeledMatrix.from_arrays(
            rng.normal(0, 1, (n, 4)), np.arange(n) % classes
        )

    def test_split_sizes_and_stratification(self):
        m = self._matrix(100, 2)
        train, test = shuffle_split(m, 0.3, seed=1)
        assert len(train) == 70 and len(test) == 30
        assert list(np.bincount(test.labels)) == [15, 15]

    def test_disjoint_union(self):
        m = self._matrix(60, 3)
        train, test = shuffle_split(m, 0.25, seed=2)
        seen = np.concatenate([train.rows, test.rows])
        assert len(seen) == 60
        # every original row appears exactly once
        orig = {tuple(r) for r in m.rows}
        combined = {tuple(r) for r in seen}
        assert orig == combined

    def test_quarter_of_2400_is_600(self):
        m = self._matrix(2400, 4)
        _, test = shuffle_split(m, 0.25, seed=0)
        assert len(test) == 600

    def test_same_seed_same_split(self):
        m = self._matrix(80, 2)
        a_train, a_test = shuffle_split(m, 0.3, seed=9)
        b_train, b_test = shuffle_split(m, 0.3, seed=9)
        assert np.array_equal(a_train.rows, b_train.rows)
        assert np.array_equal(a_test.rows, b_test.rows)

    def test_tiny_class_rejected(self):
        m = LabeledMatrix.from_arrays(np.zeros((3, 2)), [0, 0, 1])
        with pytest.raises(UsageError):
            shuffle_split(m, 0.5, seed=0)


class TestMatrixCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        m = LabeledMatrix(
            rows=rng.normal(0, 1, (12, 20)),
            labels=rng.integers(0, 3, 12),
            class_names=["UD50", "UD60", "UD70"],
            feature_names=FEATURE_NAMES,
            categories=["frontal"] * 12,
        )
        path = tmp_path / "features.csv"
        write_matrix_csv(path, m)
        back = read_matrix_csv(path)
        assert np.array_equal(back.rows, m.rows)
        assert [back.class_names[l] for l in back.labels] == [
            m.class_names[l] for l in m.labels
        ]

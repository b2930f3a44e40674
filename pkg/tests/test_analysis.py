import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazelab.analysis import (
    clean_series,
    correlation_matrix,
    describe,
    iqr_outliers,
    kde,
    kde_grid,
    mad_outliers,
    median_filter,
    per_aoi_mean,
    spatial_error_map,
)
from gazelab.errors import GazeDataError, UsageError
from gazelab.geometry import AngleSample, ErrorSeries


def naive_median_filter(x, k):
    half = k // 2
    pad = [x[0]] * half + list(x) + [x[-1]] * half
    return [sorted(pad[i : i + k])[half] for i in range(len(x))]


def series_from(values, aois=None):
    values = np.asarray(values, dtype=float)
    n = len(values)
    aois = np.asarray(aois) if aois is not None else np.ones(n, dtype=int)
    return ErrorSeries(values, values * 0.5, values * 0.25, aois, np.arange(n) * 33)


class TestMedianFilter:
    def test_constant_unchanged(self):
        out = median_filter([4.2] * 20, 5)
        assert np.all(out == 4.2)

    def test_hand_enumerated_windows(self):
        out = median_filter([1, 9, 2, 3, 100, 4], 3)
        assert list(out) == [1, 2, 3, 3, 4, 4]

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = rng.integers(5, 80)
            k = int(rng.choice([3, 5, 7, 9, 41]))
            x = rng.normal(0, 5, n)
            assert np.array_equal(median_filter(x, k), naive_median_filter(x, k))

    def test_even_kernel_rejected(self):
        with pytest.raises(UsageError):
            median_filter([1, 2, 3], 4)

    def test_idempotent_on_wide_plateaus(self):
        x = np.repeat([1.0, 5.0, 2.0], 9)
        once = median_filter(x, 5)
        assert np.array_equal(median_filter(once, 5), once)


class TestOutlierMasks:
    def test_mad_hand_example(self):
        mask = mad_outliers([2, 4, 6, 8, 100], k=3)
        assert list(mask) == [False, False, False, False, True]

    def test_all_equal_no_flags(self):
        assert not mad_outliers([5.0] * 10).any()

    def test_symmetric_series_empty_mask(self):
        x = np.array([-3, -2, -1, 0, 1, 2, 3], dtype=float)
        med = np.median(x)
        mad = np.median(np.abs(x - med))
        expected = np.abs(x - med) > 3 * mad
        assert np.array_equal(mad_outliers(x, 3), expected)
        assert not mad_outliers(x, 3).any()

    def test_iqr_hand_example(self):
        mask = iqr_outliers(list(range(1, 10)) + [100])
        assert list(mask) == [False] * 9 + [True]

    def test_uniform_ramp_empty(self):
        assert not iqr_outliers(np.arange(1, 101, dtype=float)).any()

    def test_masks_match_fence_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = rng.normal(0, 2, rng.integers(8, 60))
            q1, q3 = np.percentile(x, [25, 75])
            fence = (x > q3 + 1.5 * (q3 - q1)) | (x < q1 - 1.5 * (q3 - q1))
            assert np.array_equal(iqr_outliers(x), fence)
            med = np.median(x)
            mad = np.median(np.abs(x - med))
            assert np.array_equal(mad_outliers(x, 3), np.abs(x - med) > 3 * mad)

    def test_kept_points_inside_original_fences(self):
        # Removal cannot leave anything beyond the fences it was flagged
        # against.  (The stronger claim "IQR of kept <= IQR of original" is
        # false under interpolated quartiles: [-24,-2,-1,-1,0,2,4,4] has IQR
        # 3.75, flags -24, and the kept points have IQR 4.0.)
        rng = np.random.default_rng(19)
        for _ in range(20):
            x = np.concatenate([rng.normal(0, 1, 50), rng.normal(0, 25, 4)])
            mask = iqr_outliers(x)
            kept = x[~mask]
            q1, q3 = np.percentile(x, [25, 75])
            fence = 1.5 * (q3 - q1)
            assert np.all(kept <= q3 + fence) and np.all(kept >= q1 - fence)


class TestDescribe:
    def test_constant_series(self):
        st_ = describe([3.0, 3.0, 3.0])
        assert st_.mean == 3.0
        assert st_.mad == 0.0 and st_.iqr == 0.0
        assert st_.ci95_low == 3.0 and st_.ci95_high == 3.0

    def test_formula_oracle(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        st_ = describe(x)
        assert st_.mean == pytest.approx(x.mean())
        assert st_.mad == pytest.approx(np.median(np.abs(x - np.median(x))))
        q1, q3 = np.percentile(x, [25, 75])
        assert st_.iqr == pytest.approx(q3 - q1)
        half = 1.96 * x.std(ddof=1) / 2.0
        assert st_.ci95_high - st_.ci95_low == pytest.approx(2 * half)

    @given(
        st.lists(st.floats(-50, 50), min_size=3, max_size=40),
        st.floats(-10, 10),
    )
    @settings(max_examples=60, deadline=None)
    def test_shift_moves_mean_not_spread(self, values, c):
        base = describe(values)
        shifted = describe([v + c for v in values])
        assert shifted.mean == pytest.approx(base.mean + c, abs=1e-9)
        assert shifted.ci95_low == pytest.approx(base.ci95_low + c, abs=1e-9)
        assert shifted.mad == pytest.approx(base.mad, abs=1e-12)
        assert shifted.iqr == pytest.approx(base.iqr, abs=1e-12)


class TestKde:
    def test_single_point_closed_form(self):
        curve = kde([0.0], 0.2, [0.0])
        assert curve.densities[0] == pytest.approx(1.9947114020071635, abs=1e-12)
        assert curve.densities[0] == pytest.approx(1.9947, abs=1e-3)

    def test_far_tail_vanishes(self):
        curve = kde([0.0], 0.2, [100.0])
        assert curve.densities[0] < 1e-12

    def test_integral_close_to_one(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            x = rng.normal(0, 1, rng.integers(5, 200))
            curve = kde(x, 0.2, kde_grid(x, 0.2))
            assert 0.98 <= curve.integral() <= 1.02

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.normal(0, 1, 40)
        grid = kde_grid(x, 0.2)
        a = kde(x, 0.2, grid).densities
        b = kde(rng.permutation(x), 0.2, grid).densities
        assert np.allclose(a, b, atol=1e-12)


class TestCorrelation:
    def test_self_correlation_one(self):
        v = np.array([1.0, 2.0, 5.0, 3.0])
        _, r = correlation_matrix([("a", v), ("b", v)])
        assert r[0, 0] == pytest.approx(1.0)
        assert r[0, 1] == pytest.approx(1.0)

    def test_negation_gives_minus_one(self):
        v = np.array([1.0, 2.0, 5.0, 3.0])
        _, r = correlation_matrix([("a", v), ("b", -v)])
        assert r[0, 1] == pytest.approx(-1.0)

    def test_matches_covariance_oracle(self):
        rng = np.random.default_rng(2)
        vectors = [(f"v{i}", rng.normal(0, 1, 15)) for i in range(5)]
        names, r = correlation_matrix(vectors)
        for i in range(5):
            for j in range(5):
                a, b = vectors[i][1], vectors[j][1]
                expected = np.cov(a, b, bias=True)[0, 1] / (a.std() * b.std())
                assert r[i, j] == pytest.approx(expected, abs=1e-12)
        assert np.allclose(r, r.T, atol=1e-15)

    def test_zero_variance_reported_missing(self):
        _, r = correlation_matrix([("a", np.ones(5)), ("b", np.arange(5.0))])
        assert np.isnan(r[0, 1]) and np.isnan(r[0, 0])
        assert r[1, 1] == pytest.approx(1.0)


class TestSpatialMap:
    def _angles(self):
        return [AngleSample(1.0, float(j - 2), float(1 - i)) for i in range(3) for j in range(5)]

    def test_constant_error_uniform_map(self):
        aois = np.repeat(np.arange(1, 16), 4)
        series = series_from(np.ones(60), aois)
        smap = spatial_error_map(series, self._angles())
        assert np.allclose(smap.values, 1.0)

    def test_single_hot_aoi(self):
        aois = np.repeat(np.arange(1, 16), 4)
        values = np.zeros(60)
        values[aois == 1] = 2.5
        smap = spatial_error_map(series_from(values, aois), self._angles())
        assert smap.values[0, 0] == pytest.approx(2.5)
        assert np.count_nonzero(smap.values) == 1

    def test_cells_equal_groupby_oracle(self):
        rng = np.random.default_rng(9)
        aois = rng.integers(1, 16, 300)
        values = rng.normal(0, 2, 300)
        series = series_from(values, aois)
        smap = spatial_error_map(series, self._angles())
        for k in range(1, 16):
            expected = np.abs(values[aois == k]).mean()
            assert smap.values[(k - 1) // 5, (k - 1) % 5] == pytest.approx(expected)

    def test_empty_aoi_marked_missing(self):
        aois = np.repeat(np.arange(1, 15), 3)  # AOI 15 absent
        series = series_from(np.ones(len(aois)), aois)
        smap = spatial_error_map(series, self._angles())
        assert np.isnan(smap.values[2, 4])

    def test_per_aoi_mean_raises_on_empty(self):
        aois = np.repeat(np.arange(1, 15), 3)
        series = series_from(np.ones(len(aois)), aois)
        with pytest.raises(GazeDataError, match="AOI 15"):
            per_aoi_mean(series, "frontal")


class TestCleanSeries:
    def test_median_replaces_keeps_length(self):
        series = series_from(np.r_[np.zeros(20), 50.0, np.zeros(20)])
        out = clean_series(series, "median", kernel_w=5)
        assert len(out) == len(series)
        assert np.abs(out.frontal_err).max() == 0.0

    def test_flag_methods_drop_rows(self):
        series = series_from(np.r_[np.random.default_rng(0).normal(0, 1, 50), 40.0])
        out = clean_series(series, "iqr")
        assert len(out) == 50
        out = clean_series(series, "mad")
        assert len(out) <= 50

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazelab.analysis import describe, per_aoi_mean
from gazelab.augment import (
    AoiErrorMap,
    VARIANT_TAGS,
    augment_sample,
    cosine_convolve,
    cosine_kernel,
    flip_aoi,
    gaussian_noise,
    interpolate_variant,
    pink_noise,
    time_shift,
)
from gazelab.errors import GazeDataError, UsageError
from gazelab.geometry import ErrorSeries


def make_series(n=90, seed=0):
    rng = np.random.default_rng(seed)
    aois = np.repeat(np.arange(1, 16), int(np.ceil(n / 15)))[:n]
    return ErrorSeries(
        rng.normal(2, 1, n), rng.normal(0, 1, n), rng.normal(0, 1, n),
        aois, np.arange(n) * 33,
    )


def periodogram_slope(alpha, seeds, n=4096):
    """Fit the log-log slope of the averaged periodogram mid-band."""
    freqs = np.fft.rfftfreq(n, d=1.0 / 30.0)
    power = np.zeros(len(freqs))
    for seed in seeds:
        x = pink_noise(n, alpha, 0.2, seed)
        power += np.abs(np.fft.rfft(x)) ** 2
    power /= len(seeds)
    # middle two decades of the positive band
    lo, hi = freqs[1] * 10, freqs[-1] / 2
    sel = (freqs >= lo) & (freqs <= hi)
    coeffs = np.polyfit(np.log(freqs[sel]), np.log(power[sel]), 1)
    return coeffs[0]


class TestGaussianNoise:
    def test_sigma_zero_identity(self):
        x = np.arange(10.0)
        assert np.array_equal(gaussian_noise(x, 0.0, 1), x)

    def test_moments_at_scale(self):
        x = np.zeros(10000)
        out = gaussian_noise(x, 0.2, 42)
        assert abs(out.mean()) < 0.01
        assert abs(out.std() - 0.2) < 0.01

    def test_deterministic_per_seed(self):
        x = np.arange(50.0)
        assert np.array_equal(gaussian_noise(x, 0.3, 7), gaussian_noise(x, 0.3, 7))
        assert not np.array_equal(gaussian_noise(x, 0.3, 7), gaussian_noise(x, 0.3, 8))

    def test_negative_sigma_rejected(self):
        with pytest.raises(UsageError):
            gaussian_noise([1.0], -0.1, 0)


class TestPinkNoise:
    def test_zero_mean(self):
        x = pink_noise(1024, 0.8, 0.2, 3)
        assert abs(x.mean()) < 1e-9

    def test_target_sd(self):
        x = pink_noise(4096, 0.8, 0.2, 5)
        assert x.std() == pytest.approx(0.2, abs=1e-12)

    def test_white_slope_near_zero(self):
        slope = periodogram_slope(1e-9, range(20))
        assert abs(slope) < 0.2

    def test_pink_slope_matches_alpha(self):
        slope = periodogram_slope(0.8, range(20))
        assert slope == pytest.approx(-0.8, abs=0.2)

    def test_highpass_removes_low_band(self):
        n = 2048
        x = pink_noise(n, 0.8, 0.2, 11, sample_rate_hz=30.0, highpass_hz=2.0)
        freqs = np.fft.rfftfreq(n, d=1.0 / 30.0)
        power = np.abs(np.fft.rfft(x)) ** 2
        low = power[(freqs > 0) & (freqs < 1.8)].sum()
        assert low < power.sum() * 1e-20

    def test_too_short_rejected(self):
        with pytest.raises(UsageError):
            pink_noise(4, 0.8, 0.2, 0)


class TestInterpolate:
    def test_linear_ramp_half_offset(self):
        out = interpolate_variant([0.0, 1.0, 2.0, 3.0], 0.5)
        assert np.allclose(out, [0.5, 1.5, 2.5, 3.0])

    def test_small_offset_near_identity(self):
        x = np.sin(np.linspace(0, 3, 40))
        out = interpolate_variant(x, 1e-9)
        assert np.allclose(out, x, atol=1e-7)

    def test_constant_unchanged(self):
        out = interpolate_variant([2.0] * 8, 0.3)
        assert np.allclose(out, 2.0)

    def test_offset_bounds(self):
        with pytest.raises(UsageError):
            interpolate_variant([1.0, 2.0], 1.0)


class TestCosineConvolve:
    def test_kernel_endpoints_zero(self):
        w = cosine_kernel(30)
        assert w[0] == 0.0 and w[-1] == 0.0
        assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_constant_preserved(self):
        out = cosine_convolve([3.5] * 50, 30)
        assert np.allclose(out, 3.5, atol=1e-12)

    def test_impulse_recovers_kernel(self):
        n, width = 41, 9
        x = np.zeros(n)
        x[20] = 1.0
        out = cosine_convolve(x, width)
        w = cosine_kernel(width)
        assert np.allclose(out[20 - 4 : 20 + 5], w, atol=1e-12)

    def test_length_preserved_even_width(self):
        assert len(cosine_convolve(np.arange(45.0), 30)) == 45


class TestTimeShift:
    def test_zero_identity(self):
        x = np.arange(5.0)
        assert np.array_equal(time_shift(x, 0), x)

    def test_hand_rotation(self):
        assert list(time_shift([1, 2, 3, 4, 5], 2)) == [4, 5, 1, 2, 3]

    def test_group_property(self):
        x = np.arange(12.0)
        assert np.array_equal(time_shift(time_shift(x, 5), 7), x)

    def test_multiset_preserved(self):
        x = np.random.default_rng(1).normal(0, 1, 30)
        assert sorted(time_shift(x, 11)) == sorted(x)


class TestFlips:
    def test_identity_map_horizontal(self):
        out = flip_aoi(np.arange(1.0, 16.0), "horizontal")
        assert list(out) == [11, 12, 13, 14, 15, 6, 7, 8, 9, 10, 1, 2, 3, 4, 5]

    def test_vertical_swaps_outer_columns(self):
        out = flip_aoi(np.arange(1.0, 16.0), "vertical")
        assert list(out) == [5, 2, 3, 4, 1, 10, 7, 8, 9, 6, 15, 12, 13, 14, 11]

    def test_centre_fixed(self):
        v = np.arange(1.0, 16.0)
        assert flip_aoi(v, "horizontal")[7] == 8.0
        assert flip_aoi(v, "vertical")[7] == 8.0

    @given(st.lists(st.floats(-10, 10), min_size=15, max_size=15))
    @settings(max_examples=60, deadline=None)
    def test_involution_and_stat_preservation(self, values):
        v = np.array(values)
        for axis in ("horizontal", "vertical"):
            flipped = flip_aoi(v, axis)
            assert np.array_equal(flip_aoi(flipped, axis), v)
            assert sorted(flipped) == sorted(v)

    def test_flip_preserves_describe_stats(self):
        v = np.random.default_rng(8).normal(2, 1, 15)
        for axis in ("horizontal", "vertical"):
            a, b = describe(v), describe(flip_aoi(v, axis))
            assert a.mean == pytest.approx(b.mean, abs=1e-12)
            assert a.mad == pytest.approx(b.mad, abs=1e-12)
            assert a.iqr == pytest.approx(b.iqr, abs=1e-12)

    def test_wrong_length_rejected(self):
        with pytest.raises(UsageError):
            flip_aoi(np.ones(14), "horizontal")


class TestAugmentSample:
    def test_exactly_ten_distinct_tags(self):
        out = augment_sample(make_series(), seed=4)
        tags = [tag for tag, _ in out.variants]
        assert tags == list(VARIANT_TAGS)
        assert len(set(tags)) == 10

    def test_pipeline_recipe_matches_variant_order(self):
        from gazelab.augment import DEFAULT_PIPELINE

        out = augment_sample(make_series(), seed=4)
        assert [s.tag for s in DEFAULT_PIPELINE] == [tag for tag, _ in out.variants]

    def test_series_variants_keep_length(self):
        series = make_series(120)
        out = augment_sample(series, seed=4)
        for tag, payload in out.variants:
            if isinstance(payload, ErrorSeries):
                assert len(payload) == 120

    def test_flip_variants_preserve_value_multiset(self):
        series = make_series(120)
        out = augment_sample(series, seed=4)
        base = per_aoi_mean(series, "frontal", absolute=True)
        for tag, payload in out.variants[8:]:
            assert isinstance(payload, AoiErrorMap)
            assert sorted(payload.frontal) == pytest.approx(sorted(base))

    def test_deterministic_per_seed(self):
        a = augment_sample(make_series(), seed=9)
        b = augment_sample(make_series(), seed=9)
        for (ta, pa), (tb, pb) in zip(a.variants, b.variants):
            assert ta == tb
            if isinstance(pa, ErrorSeries):
                assert np.array_equal(pa.frontal_err, pb.frontal_err)
                assert np.array_equal(pa.yaw_err, pb.yaw_err)
            else:
                assert np.array_equal(pa.frontal, pb.frontal)

    def test_different_seed_changes_noise(self):
        a = augment_sample(make_series(), seed=1)
        b = augment_sample(make_series(), seed=2)
        assert not np.array_equal(a.variants[0][1].frontal_err, b.variants[0][1].frontal_err)

    def test_short_series_rejected(self):
        with pytest.raises(GazeDataError):
            augment_sample(make_series(20), seed=0)

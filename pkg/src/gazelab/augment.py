"""Ten-fold expansion of error datasets.

Each cleaned error series is turned into exactly ten variants: additive
Gaussian noise, additive pink (1/f^alpha) jitter, fractional-offset linear
resampling, raised-cosine smoothing, a circular time shift, three
combinations of those, and horizontal/vertical flips of the per-AOI error
layout.  All randomness is seeded per variant, so a fixed seed reproduces
the whole set bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import per_aoi_mean
from .dataset import N_AOI, fmt_float
from .errors import GazeDataError, UsageError
from .geometry import CATEGORIES, ErrorSeries

VARIANT_TAGS = (
    "gaussian",
    "pink_jitter",
    "interpolate",
    "cosconv",
    "timeshift",
    "gauss_interp",
    "pink_conv",
    "gauss_shift",
    "hflip",
    "vflip",
)

DEFAULT_SIGMA = 0.2
DEFAULT_ALPHA = 0.8
DEFAULT_WINDOW = 30
DEFAULT_SHIFT = 10
DEFAULT_OFFSET = 0.5


@dataclass(frozen=True)
class AugmentStrategy:
    """Recipe for one variant; unused parameters are ignored by the tag."""

    tag: str
    sigma: float = DEFAULT_SIGMA
    alpha: float = DEFAULT_ALPHA
    window: int = DEFAULT_WINDOW
    shift: int = DEFAULT_SHIFT
    offset: float = DEFAULT_OFFSET

    def __post_init__(self):
        if self.tag not in VARIANT_TAGS:
            raise UsageError(f"unknown augmentation tag {self.tag!r}")
        if self.sigma < 0:
            raise UsageError("sigma must be non-negative")
        if self.window < 2:
            raise UsageError("window must be >= 2")
        if not (0 < self.alpha < 2):
            raise UsageError("alpha must be in (0, 2)")


DEFAULT_PIPELINE = (
    AugmentStrategy("gaussian"),
    AugmentStrategy("pink_jitter"),
    AugmentStrategy("interpolate"),
    AugmentStrategy("cosconv"),
    AugmentStrategy("timeshift"),
    AugmentStrategy("gauss_interp"),
    AugmentStrategy("pink_conv"),
    AugmentStrategy("gauss_shift"),
    AugmentStrategy("hflip"),
    AugmentStrategy("vflip"),
)


@dataclass
class AoiErrorMap:
    """Per-AOI mean |error| vectors with the series the stats came from.

    Flip variants permute error magnitude across screen locations; the
    scalar statistics of the underlying series are unchanged, so the source
    series is kept for feature building.
    """

    frontal: np.ndarray
    yaw: np.ndarray
    pitch: np.ndarray
    source: ErrorSeries

    def channel(self, category: str) -> np.ndarray:
        if category not in CATEGORIES:
            raise GazeDataError(f"unknown error category {category!r}")
        return getattr(self, category)


@dataclass
class AugmentedSet:
    variants: list[tuple[str, ErrorSeries | AoiErrorMap]]
    seed: int = 0

    def __post_init__(self):
        if len(self.variants) != len(VARIANT_TAGS):
            raise GazeDataError(
                f"an augmented set must hold exactly {len(VARIANT_TAGS)} variants"
            )


def gaussian_noise(x, sigma: float, seed) -> np.ndarray:
    """Add zero-mean Gaussian noise with the given standard deviation."""
    if sigma < 0:
        raise UsageError("sigma must be non-negative")
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    return x + rng.normal(0.0, sigma, x.size) if sigma > 0 else x.copy()


def pink_noise(n: int, alpha: float, sigma: float, seed,
               sample_rate_hz: float = 30.0, highpass_hz: float | None = None) -> np.ndarray:
    """Zero-mean noise with power spectral density proportional to 1/f^alpha.

    White noise is shaped in the frequency domain (amplitude scaled by
    f^(-alpha/2), DC bin zeroed) and rescaled to the requested standard
    deviation.  ``highpass_hz`` optionally zeroes every bin below that
    frequency for the given sample rate.
    """
    if n < 8:
        raise UsageError("pink_noise needs n >= 8")
    if sigma < 0:
        raise UsageError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate_hz)
    shape = np.zeros_like(freqs)
    shape[1:] = freqs[1:] ** (-alpha / 2.0)
    if highpass_hz is not None:
        shape[freqs < highpass_hz] = 0.0
    signal = np.fft.irfft(spectrum * shape, n)
    signal -= signal.mean()
    sd = signal.std()
    if sd > 0 and sigma > 0:
        signal *= sigma / sd
    else:
        signal[:] = 0.0
    return signal


def interpolate_variant(x, offset_frac: float) -> np.ndarray:
    """Resample linearly at fractional indices i + offset; last value repeats."""
    if not (0 < offset_frac < 1):
        raise UsageError("offset_frac must be in (0, 1)")
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise UsageError("interpolate_variant needs at least 2 samples")
    idx = np.arange(x.size, dtype=float) + offset_frac
    return np.interp(idx, np.arange(x.size, dtype=float), x)


def cosine_kernel(width: int) -> np.ndarray:
    """Raised-cosine window 0.5*(1 - cos(2 pi n / (N-1))), unit sum."""
    if width < 2:
        raise UsageError("kernel width must be >= 2")
    n = np.arange(width)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / (width - 1)))
    return w / w.sum()


def cosine_convolve(x, width: int = DEFAULT_WINDOW) -> np.ndarray:
    """Smooth with a unit-sum raised-cosine kernel; length preserved.

    Unit normalisation keeps the magnitude scale of the input, so constants
    pass through unchanged.
    """
    x = np.asarray(x, dtype=float)
    w = cosine_kernel(width)
    left = (width - 1) // 2
    right = width - 1 - left
    padded = np.pad(x, (left, right), mode="edge")
    return np.convolve(padded, w, mode="valid")


def time_shift(x, s: int) -> np.ndarray:
    """Circular shift by ``s`` samples (sample count preserved)."""
    x = np.asarray(x, dtype=float)
    if not (0 <= s < x.size):
        raise UsageError("shift must satisfy 0 <= s < len(x)")
    return np.roll(x, s)


_HFLIP = np.array([10, 11, 12, 13, 14, 5, 6, 7, 8, 9, 0, 1, 2, 3, 4])
_VFLIP = np.array([4, 1, 2, 3, 0, 9, 6, 7, 8, 5, 14, 11, 12, 13, 10])


def flip_aoi(errmap, axis: str) -> np.ndarray:
    """Mirror a 15-entry per-AOI error layout.

    ``horizontal`` swaps the top AOI row (1-5) with the bottom row (11-15);
    ``vertical`` swaps the left column (1, 6, 11) with the right column
    (5, 10, 15).  Everything else stays in place, so both are involutions.
    """
    errmap = np.asarray(errmap, dtype=float)
    if errmap.shape != (N_AOI,):
        raise UsageError(f"per-AOI map must have exactly {N_AOI} entries")
    if axis == "horizontal":
        return errmap[_HFLIP]
    if axis == "vertical":
        return errmap[_VFLIP]
    raise UsageError("axis must be 'horizontal' or 'vertical'")


def _apply_series(series: ErrorSeries, fn) -> ErrorSeries:
    return series.with_channels(*(fn(series.channel(c), c) for c in CATEGORIES))


def _aoi_map(series: ErrorSeries, axis: str) -> AoiErrorMap:
    flipped = {
        cat: flip_aoi(per_aoi_mean(series, cat, absolute=True), axis)
        for cat in CATEGORIES
    }
    return AoiErrorMap(source=series, **flipped)


def augment_sample(errors: ErrorSeries, seed: int) -> AugmentedSet:
    """Build the ten standard variants of one cleaned error series.

    Variant order is fixed: gaussian, pink jitter, interpolation,
    raised-cosine smoothing, time shift, gaussian-on-interpolated,
    pink-on-smoothed, gaussian-on-shifted, then the two AOI flips.  The
    variant at position i uses seed + i (1-based), with an independent
    stream per channel.
    """
    if seed < 0:
        raise UsageError("seed must be non-negative")
    if len(errors) < DEFAULT_WINDOW:
        raise GazeDataError(
            f"series too short to augment: need >= {DEFAULT_WINDOW} samples, got {len(errors)}"
        )

    def noisy(x, cat, variant_idx):
        return gaussian_noise(x, DEFAULT_SIGMA, (seed + variant_idx, CATEGORIES.index(cat)))

    def pink(x, cat, variant_idx):
        return x + pink_noise(
            len(x), DEFAULT_ALPHA, DEFAULT_SIGMA, (seed + variant_idx, CATEGORIES.index(cat))
        )

    interp = _apply_series(errors, lambda x, c: interpolate_variant(x, DEFAULT_OFFSET))
    smooth = _apply_series(errors, lambda x, c: cosine_convolve(x, DEFAULT_WINDOW))
    shifted = _apply_series(errors, lambda x, c: time_shift(x, DEFAULT_SHIFT))

    variants: list[tuple[str, ErrorSeries | AoiErrorMap]] = [
        ("gaussian", _apply_series(errors, lambda x, c: noisy(x, c, 1))),
        ("pink_jitter", _apply_series(errors, lambda x, c: pink(x, c, 2))),
        ("interpolate", interp),
        ("cosconv", smooth),
        ("timeshift", shifted),
        ("gauss_interp", _apply_series(interp, lambda x, c: noisy(x, c, 6))),
        ("pink_conv", _apply_series(smooth, lambda x, c: pink(x, c, 7))),
        ("gauss_shift", _apply_series(shifted, lambda x, c: noisy(x, c, 8))),
        ("hflip", _aoi_map(errors, "horizontal")),
        ("vflip", _aoi_map(errors, "vertical")),
    ]
    return AugmentedSet(variants=variants, seed=seed)


def write_variant_csv(path: str | Path, tag: str, payload: ErrorSeries | AoiErrorMap,
                      header: dict[str, str] | None = None) -> None:
    """Export one variant; series and AOI-map variants use matching layouts."""
    lines = [f"# augmented_by={tag}"]
    for key, value in (header or {}).items():
        lines.append(f"# {key}={value}")
    if isinstance(payload, AoiErrorMap):
        lines.append("aoi_id,frontal_err,yaw_err,pitch_err")
        for k in range(N_AOI):
            lines.append(
                f"{k + 1},{fmt_float(payload.frontal[k])},"
                f"{fmt_float(payload.yaw[k])},{fmt_float(payload.pitch[k])}"
            )
    else:
        lines.append("timestamp_ms,aoi_id,frontal_err,yaw_err,pitch_err")
        for i in range(len(payload)):
            lines.append(
                f"{payload.timestamps[i]},{payload.aoi_ids[i]},"
                f"{fmt_float(payload.frontal_err[i])},{fmt_float(payload.yaw_err[i])},"
                f"{fmt_float(payload.pitch_err[i])}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

"""Cleaning and statistical characterisation of error series.

Outlier handling offers three methods: a 1-D median filter that replaces
every value by its windowed median (the default cleaner, kernel width 41),
and two flagging rules (median-absolute-deviation distance and Tukey IQR
fences) that mark samples for removal.  Characterisation covers robust
descriptive statistics, Gaussian kernel density estimates, per-AOI spatial
error maps and Pearson correlation between datasets.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import AOI_COLS, AOI_ROWS, N_AOI, fmt_float
from .errors import GazeDataError, UsageError
from .geometry import AngleSample, ErrorSeries


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    mad: float
    iqr: float
    ci95_low: float
    ci95_high: float
    n: int


@dataclass
class KdeCurve:
    eval_points: np.ndarray
    densities: np.ndarray
    bandwidth_h: float

    def integral(self) -> float:
        return float(np.trapezoid(self.densities, self.eval_points))


@dataclass
class SpatialErrorMap:
    """Mean absolute frontal error per AOI, keyed by target yaw/pitch angle.

    ``values`` is rows x columns (3 x 5) matching the AOI layout; cells
    with no samples are NaN.
    """

    values: np.ndarray  # (AOI_ROWS, AOI_COLS)
    yaw_bins_deg: np.ndarray  # (AOI_COLS,)
    pitch_bins_deg: np.ndarray  # (AOI_ROWS,)


def median_filter(x, kernel_w: int) -> np.ndarray:
    """Windowed median with replicate edge padding; length preserved."""
    if kernel_w < 1 or kernel_w % 2 == 0:
        raise UsageError("kernel width must be an odd positive integer")
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise UsageError("median_filter needs at least one sample")
    if kernel_w == 1:
        return x.copy()
    half = kernel_w // 2
    padded = np.pad(x, half, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, kernel_w)
    return np.median(windows, axis=1)


def _mad(x: np.ndarray) -> float:
    med = np.median(x)
    return float(np.median(np.abs(x - med)))


def _iqr_mask(x: np.ndarray) -> np.ndarray:
    q1, q3 = np.percentile(x, [25, 75], method="linear")
    iqr = q3 - q1
    return (x > q3 + 1.5 * iqr) | (x < q1 - 1.5 * iqr)


def mad_outliers(x, k: float = 3.0) -> np.ndarray:
    """Flag samples further than ``k`` MADs from the median.

    A degenerate spread (MAD == 0, e.g. a heavily repeated value) would
    flag everything off the median, so that case falls back to the IQR
    fence rule.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise UsageError("mad_outliers needs at least 3 samples")
    mad = _mad(x)
    if mad == 0.0:
        return _iqr_mask(x)
    return np.abs(x - np.median(x)) > k * mad


def iqr_outliers(x) -> np.ndarray:
    """Flag samples beyond the 1.5 IQR fences (quartiles interpolated)."""
    x = np.asarray(x, dtype=float)
    if x.size < 4:
        raise UsageError("iqr_outliers needs at least 4 samples")
    return _iqr_mask(x)


def describe(x) -> DescriptiveStats:
    """Mean, MAD, IQR and the normal-approximation 95% CI of the mean.

    The CI uses the sample standard deviation (ddof=1):
    mean +- 1.96 * sd / sqrt(n).
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise UsageError("describe needs at least 2 samples")
    mean = float(np.mean(x))
    q1, q3 = np.percentile(x, [25, 75], method="linear")
    half = 1.96 * float(np.std(x, ddof=1)) / np.sqrt(x.size)
    return DescriptiveStats(
        mean=mean,
        mad=_mad(x),
        iqr=float(q3 - q1),
        ci95_low=mean - half,
        ci95_high=mean + half,
        n=int(x.size),
    )


def kde(x, h: float, eval_points) -> KdeCurve:
    """Gaussian kernel density estimate at the given evaluation points.

    density(y) = (1 / (n h)) * sum_i K((y - x_i) / h) with the standard
    normal kernel, so the curve integrates to ~1 over a grid spanning the
    data plus a few bandwidths.
    """
    if h <= 0:
        raise UsageError("bandwidth must be positive")
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise UsageError("kde needs at least one sample")
    pts = np.asarray(eval_points, dtype=float)
    u = (pts[:, None] - x[None, :]) / h
    dens = np.exp(-0.5 * u**2).sum(axis=1) / (x.size * h * np.sqrt(2 * np.pi))
    return KdeCurve(eval_points=pts, densities=dens, bandwidth_h=h)


def kde_grid(x, h: float, n_points: int = 256) -> np.ndarray:
    """Evaluation grid covering the data plus four bandwidths each side."""
    x = np.asarray(x, dtype=float)
    return np.linspace(x.min() - 4 * h, x.max() + 4 * h, n_points)


def per_aoi_mean(series: ErrorSeries, category: str = "frontal",
                 absolute: bool = True, allow_empty: bool = False) -> np.ndarray:
    """Mean (absolute) error at each of the 15 AOIs, in AOI order."""
    values = series.channel(category)
    if absolute:
        values = np.abs(values)
    out = np.full(N_AOI, np.nan)
    for k in range(1, N_AOI + 1):
        sel = series.aoi_ids == k
        if sel.any():
            out[k - 1] = values[sel].mean()
        elif not allow_empty:
            raise GazeDataError(f"AOI {k} has no samples")
    return out


def correlation_matrix(named_vectors) -> tuple[list[str], np.ndarray]:
    """Pearson correlation between named equal-length vectors.

    Takes ``[(name, vector), ...]``; for error series, reduce each dataset
    to its per-AOI mean 15-vector first (`per_aoi_mean`).  A zero-variance
    vector has no defined correlation, so its row and column are NaN.
    """
    named_vectors = list(named_vectors)
    if len(named_vectors) < 2:
        raise UsageError("need at least two vectors to correlate")
    names = [name for name, _ in named_vectors]
    data = np.asarray([np.asarray(v, dtype=float) for _, v in named_vectors])
    if data.ndim != 2:
        raise UsageError("vectors must share one length")
    centered = data - data.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered**2).sum(axis=1))
    m = len(names)
    r = np.full((m, m), np.nan)
    for i in range(m):
        for j in range(m):
            if norms[i] == 0 or norms[j] == 0:
                continue
            r[i, j] = float(centered[i] @ centered[j] / (norms[i] * norms[j]))
    return names, r


def spatial_error_map(series: ErrorSeries, aoi_angles: list[AngleSample]) -> SpatialErrorMap:
    """Fold per-AOI mean |frontal error| onto the target yaw/pitch grid."""
    if len(aoi_angles) != N_AOI:
        raise UsageError(f"need {N_AOI} per-AOI ground-truth angles")
    means = per_aoi_mean(series, "frontal", absolute=True, allow_empty=True)
    values = means.reshape(AOI_ROWS, AOI_COLS)
    yaw_bins = np.array([aoi_angles[j].theta_yaw for j in range(AOI_COLS)])
    pitch_bins = np.array([aoi_angles[i * AOI_COLS].theta_pitch for i in range(AOI_ROWS)])
    return SpatialErrorMap(values=values, yaw_bins_deg=yaw_bins, pitch_bins_deg=pitch_bins)


def clean_series(series: ErrorSeries, method: str = "median", kernel_w: int = 41,
                 mad_k: float = 3.0) -> ErrorSeries:
    """Apply one outlier treatment to all three error channels.

    ``median`` replaces values in place and keeps every sample; ``mad`` and
    ``iqr`` drop samples flagged on any channel.
    """
    if method == "median":
        return series.with_channels(
            median_filter(series.frontal_err, kernel_w),
            median_filter(series.yaw_err, kernel_w),
            median_filter(series.pitch_err, kernel_w),
        )
    if method in ("mad", "iqr"):
        flag = np.zeros(len(series), dtype=bool)
        for cat in ("frontal", "yaw", "pitch"):
            x = series.channel(cat)
            flag |= mad_outliers(x, mad_k) if method == "mad" else iqr_outliers(x)
        keep = ~flag
        return ErrorSeries(
            series.frontal_err[keep],
            series.yaw_err[keep],
            series.pitch_err[keep],
            series.aoi_ids[keep],
            series.timestamps[keep],
        )
    raise UsageError(f"unknown cleaning method {method!r}")


def write_stats_csv(path: str | Path, named_stats) -> None:
    """One row per dataset: name, mean, mad, iqr, ci bounds, n."""
    lines = ["dataset,mean,mad,iqr,ci95_low,ci95_high,n"]
    for name, st in named_stats:
        lines.append(
            f"{name},{fmt_float(st.mean)},{fmt_float(st.mad)},{fmt_float(st.iqr)},"
            f"{fmt_float(st.ci95_low)},{fmt_float(st.ci95_high)},{st.n}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_spatial_map_csv(path: str | Path, smap: SpatialErrorMap) -> None:
    """One row per AOI cell: grid indices, angle bins, mean |error|."""
    lines = ["row,col,gt_yaw_deg,gt_pitch_deg,mean_abs_error_deg"]
    for i in range(AOI_ROWS):
        for j in range(AOI_COLS):
            v = smap.values[i, j]
            cell = "" if np.isnan(v) else fmt_float(v)
            lines.append(
                f"{i},{j},{fmt_float(smap.yaw_bins_deg[j])},"
                f"{fmt_float(smap.pitch_bins_deg[i])},{cell}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_correlation_csv(path: str | Path, names: list[str], r: np.ndarray) -> None:
    lines = ["dataset," + ",".join(names)]
    for i, name in enumerate(names):
        cells = ["" if np.isnan(v) else fmt_float(v) for v in r[i]]
        lines.append(name + "," + ",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

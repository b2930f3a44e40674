"""Outlier handling and the statistical characterisation toolbox.

Spikes a clean error series, compares the three cleaning methods, then
shows KDE curves, the per-AOI spatial map and dataset correlations.
"""

import numpy as np

from gazelab import (
    SessionMeta,
    clean_series,
    compute_errors,
    correlation_matrix,
    describe,
    iqr_outliers,
    kde,
    mad_outliers,
    median_filter,
    per_aoi_mean,
    spatial_error_map,
)
from gazelab.analysis import kde_grid
from gazelab.geometry import grid_gt_angles
from gazelab.synth import DEFAULT_SCREEN, ConditionProfile, profile_for, synth_session

meta = SessionMeta("P01", "desktop", "UD60", 600.0)
session = synth_session(ConditionProfile("UD60", 2.0, 0.2), DEFAULT_SCREEN, meta, seed=1)
truth = compute_errors(session).frontal_err

# --- inject 5% spikes of 10 degrees ---------------------------------------
rng = np.random.default_rng(0)
idx = rng.choice(np.arange(1, len(truth) - 1), size=len(truth) // 20, replace=False)
spiked = truth.copy()
spiked[idx] += 10.0

filtered = median_filter(spiked, 41)
print("spike residual after median filter:", np.abs(filtered[idx] - truth[idx]).max().round(3), "deg")
print("MAD flags:", mad_outliers(spiked, 3)[idx].mean().round(2), "of spikes")
print("IQR flags:", iqr_outliers(spiked)[idx].mean().round(2), "of spikes")

# --- the three methods through the series API ------------------------------
errors = compute_errors(session)
for method in ("median", "mad", "iqr"):
    cleaned = clean_series(errors, method=method)
    st = describe(cleaned.frontal_err)
    print(f"{method:>6}: n={len(cleaned)} mean={st.mean:.3f} MAD={st.mad:.3f}")

# --- density estimate of the error magnitudes ------------------------------
x = np.abs(errors.frontal_err)
curve = kde(x, 0.2, kde_grid(x, 0.2))
print(f"KDE at bandwidth 0.2 integrates to {curve.integral():.4f}")
peak = curve.eval_points[np.argmax(curve.densities)]
print(f"density peaks near {peak:.2f} deg")

# --- spatial structure: which targets are worst? ---------------------------
smap = spatial_error_map(errors, grid_gt_angles(session))
print("per-AOI mean |error| (rows = pitch bins):")
print(np.round(smap.values, 2))

# --- correlations between conditions ---------------------------------------
vectors = []
for condition in ("UD50", "UD60", "UD70"):
    m = SessionMeta("P01", "desktop", condition, 600.0)
    s = synth_session(profile_for(condition), DEFAULT_SCREEN, m, seed=3)
    vectors.append((condition, per_aoi_mean(compute_errors(s), "frontal")))
names, r = correlation_matrix(vectors)
print("correlation matrix over per-AOI 15-vectors:")
for name, row in zip(names, np.round(r, 2)):
    print(f"  {name}: {row}")

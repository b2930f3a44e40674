"""Predicting gaze error magnitude from the gaze angles.

Fits the regression family (OLS, ridge, lasso, elastic net, polynomial)
on standardized [frontal, yaw, pitch] angles and compares held-out RMSE,
then exports the elastic-net coefficients.
"""

import numpy as np

from gazelab import compute_errors, fill_missing
from gazelab.analysis import clean_series
from gazelab.geometry import binocular_average, to_angles
from gazelab.learn import (
    elastic_net_fit,
    export_error_model,
    linear_fit,
    linear_predict,
    rmse,
)
from gazelab.synth import synth_task_sessions

# --- build per-sample (angles -> |frontal error|) pairs ----------------------
sessions = [
    s for s in synth_task_sessions("head_pose", participants=6, seed=6)
    if s.meta.condition == "HeadRoll20"
]
angles, target = [], []
for session in sessions:
    filled = fill_missing(session)
    series = clean_series(compute_errors(filled), method="median", kernel_w=41)
    z = session.meta.user_distance_z
    for rec in filled.records:
        g = to_angles(binocular_average(rec, session.screen), session.screen, z)
        angles.append([g.theta_gaze, g.theta_yaw, g.theta_pitch])
    target.extend(np.abs(series.frontal_err))
x, y = np.asarray(angles), np.asarray(target)
print(f"{len(x)} samples from {len(sessions)} head-roll sessions")

# --- split, standardize on train, fit each model -----------------------------
rng = np.random.default_rng(0)
order = rng.permutation(len(x))
test_idx, train_idx = order[: len(x) // 4], order[len(x) // 4 :]
x_mu, x_sd = x[train_idx].mean(axis=0), x[train_idx].std(axis=0)
y_mu, y_sd = y[train_idx].mean(), y[train_idx].std()
xs, ys = (x - x_mu) / x_sd, (y - y_mu) / y_sd

def held_out_rmse(model):
    pred = linear_predict(model, xs[test_idx]) * y_sd + y_mu
    return rmse(pred, y[test_idx])

fits = {
    "linear": linear_fit(xs[train_idx], ys[train_idx], penalty="none"),
    "polynomial": linear_fit(xs[train_idx], ys[train_idx], penalty="ridge",
                             z=1e-3, degree=2),
    "ridge": linear_fit(xs[train_idx], ys[train_idx], penalty="ridge", z=1e-3),
    "lasso": linear_fit(xs[train_idx], ys[train_idx], penalty="lasso", z=1e-3),
    "elasticnet": elastic_net_fit(xs[train_idx], ys[train_idx], alpha=0.5, mix=0.5),
}
baseline = rmse(np.full(len(test_idx), y_mu), y[test_idx])
print(f"mean-predictor baseline: {baseline:.3f} deg")
for name, model in fits.items():
    print(f"  {name:<11} rmse {held_out_rmse(model):.3f} deg")

# --- the exportable three-coefficient model ----------------------------------
em = export_error_model(fits["elasticnet"], "HeadRoll20")
print(f"\n{em.condition}: error = {em.intercept:.1e} "
      f"+ {em.coefficients[0]:.4f}*gaze + {em.coefficients[1]:.4f}*yaw "
      f"+ {em.coefficients[2]:.4f}*pitch")

"""Sessions, the canonical CSV format, and pixel-to-angle conversion.

Generates a synthetic fixation recording, round-trips it through the
on-disk format, and walks one sample through the angle math.
"""

import tempfile
from pathlib import Path

import numpy as np

from gazelab import (
    ScreenConfig,
    SessionMeta,
    binocular_average,
    compute_errors,
    describe,
    load_session,
    save_session,
    to_angles,
)
from gazelab.synth import DEFAULT_SCREEN, profile_for, synth_session

# --- a 22-inch desktop display -------------------------------------------
screen = ScreenConfig.from_diagonal(1680, 1050, 558.8)
print(f"pixel pitch: {screen.pixel_pitch_mu:.4f} mm/px, origin {screen.origin}")

# --- one synthetic session at 60 cm ---------------------------------------
meta = SessionMeta("P01", "desktop", "UD60", 600.0)
session = synth_session(profile_for("UD60"), DEFAULT_SCREEN, meta, seed=7)
print(f"session: {len(session)} samples over {len(session.aoi_grid)} targets")

# --- the canonical CSV round-trips byte for byte --------------------------
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "P01_UD60.csv"
    save_session(session, path)
    again = Path(tmp) / "again.csv"
    save_session(load_session(path), again)
    print("round-trip identical:", path.read_bytes() == again.read_bytes())

# --- angle math for one sample --------------------------------------------
rec = session.records[100]
gaze_centred = binocular_average(rec, screen)
angles = to_angles(gaze_centred, screen, meta.user_distance_z)
print(
    f"sample at t={rec.timestamp_ms} ms: frontal {angles.theta_gaze:.3f} deg, "
    f"yaw {angles.theta_yaw:.3f} deg, pitch {angles.theta_pitch:.3f} deg"
)

# --- full error series -----------------------------------------------------
errors = compute_errors(session)
stats = describe(errors.frontal_err)
print(
    f"frontal error: mean {stats.mean:.2f} deg, MAD {stats.mad:.2f} deg, "
    f"IQR {stats.iqr:.2f} deg, CI [{stats.ci95_low:.2f}, {stats.ci95_high:.2f}]"
)
print("yaw/pitch error sd:", np.std(errors.yaw_err).round(2), np.std(errors.pitch_err).round(2))

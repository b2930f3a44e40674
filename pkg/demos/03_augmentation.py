"""The ten-fold augmentation set and its invariants."""

import numpy as np

from gazelab import (
    SessionMeta,
    augment_sample,
    compute_errors,
    describe,
    flip_aoi,
    pink_noise,
)
from gazelab.augment import AoiErrorMap
from gazelab.synth import DEFAULT_SCREEN, profile_for, synth_session

meta = SessionMeta("P01", "desktop", "UD60", 600.0)
session = synth_session(profile_for("UD60"), DEFAULT_SCREEN, meta, seed=2)
errors = compute_errors(session)

# --- one call produces the whole set ---------------------------------------
augmented = augment_sample(errors, seed=11)
print(f"{len(augmented.variants)} variants:")
for tag, payload in augmented.variants:
    kind = "per-AOI map" if isinstance(payload, AoiErrorMap) else f"series[{len(payload)}]"
    print(f"  {tag:<12} {kind}")

# --- noise variants stay close to the original -----------------------------
base = describe(errors.frontal_err)
noisy = describe(augmented.variants[0][1].frontal_err)
print(f"\ngaussian variant mean drift: {abs(noisy.mean - base.mean):.3f} deg")

# --- flips permute location but preserve every scalar statistic ------------
v = np.arange(1.0, 16.0)
print("hflip of AOI indices:", flip_aoi(v, "horizontal").astype(int))
print("vflip of AOI indices:", flip_aoi(v, "vertical").astype(int))
from gazelab import per_aoi_mean

hmap = augmented.variants[8][1]
original = per_aoi_mean(errors, "frontal")
assert np.allclose(np.sort(hmap.frontal), np.sort(original))
print("flip preserves the multiset of per-AOI magnitudes")

# --- pink jitter really is 1/f^0.8 ------------------------------------------
n = 4096
freqs = np.fft.rfftfreq(n, d=1 / 30.0)
power = np.zeros_like(freqs)
for seed in range(20):
    power += np.abs(np.fft.rfft(pink_noise(n, 0.8, 0.2, seed))) ** 2
sel = (freqs >= freqs[1] * 10) & (freqs <= freqs[-1] / 2)
slope = np.polyfit(np.log(freqs[sel]), np.log(power[sel] / 20), 1)[0]
print(f"averaged periodogram slope: {slope:.2f} (target -0.8)")

"""Deterministic synthetic gaze sessions with controllable error structure.

Sessions emulate the fixation recordings the pipeline consumes: the target
dot visits the 15 AOIs in order, dwelling ~41 samples at each, and the
simulated gaze sits at the target plus a condition-shaped angular offset
with pink-noise jitter.  After shaping, the per-sample frontal offsets are
rescaled so the session's mean and MAD land exactly on the profile's
targets, then mapped back to pixel coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .augment import pink_noise
from .dataset import (
    AOI_COLS,
    AOI_ROWS,
    N_AOI,
    GazeRecord,
    GazeSession,
    ScreenConfig,
    SessionMeta,
    make_aoi_grid,
)
from .errors import UsageError

GRADIENT_MODES = ("uniform", "yaw", "pitch", "radial")

# Session-level gaze error statistics (degrees) reported for a consumer
# tracker under each operating condition; used to calibrate the generator.
DESKTOP_STATS = {
    "UD50": (3.37, 3.49),
    "UD60": (2.04, 1.77),
    "UD70": (1.21, 0.82),
    "UD80": (1.02, 0.66),
    "Neutral": (2.04, 1.77),
    "HeadRoll20": (3.7, 3.63),
    "HeadYaw20": (8.51, 10.0),
    "HeadPitch20": (3.15, 1.90),
}
TABLET_STATS = {
    "UD50": (2.68, 0.38),
    "UD60": (2.46, 0.42),
    "UD70": (0.59, 0.29),
    "UD80": (1.55, 0.24),
    "Neutral": (2.46, 0.42),
    "PlatRoll20": (7.74, 0.77),
    "PlatYaw20": (4.25, 0.60),
    "PlatPitch20": (2.45, 0.46),
}

_GRADIENT_BY_CONDITION = {
    "HeadYaw20": "yaw",
    "HeadPitch20": "pitch",
    "HeadRoll20": "radial",
    "PlatYaw20": "yaw",
    "PlatPitch20": "pitch",
    "PlatRoll20": "radial",
}

DEFAULT_SCREEN = ScreenConfig.from_diagonal(1680, 1050, 558.8)
TABLET_SCREEN = ScreenConfig.from_diagonal(1920, 800, 256.5)


@dataclass(frozen=True)
class ConditionProfile:
    """Target error statistics and spatial shape for one condition."""

    condition: str
    mean_deg: float
    mad_deg: float
    gradient: str = "uniform"
    gradient_strength: float = 0.6
    spread_frac: float = 0.0  # per-session multiplicative target jitter

    def __post_init__(self):
        if self.mean_deg < 0 or self.mad_deg < 0:
            raise UsageError("target mean and MAD must be non-negative")
        if self.gradient not in GRADIENT_MODES:
            raise UsageError(f"unknown gradient mode {self.gradient!r}")


def profile_for(condition: str, platform: str = "desktop",
                spread_frac: float = 0.0) -> ConditionProfile:
    """Preset profile calibrated to the reported session statistics."""
    stats = DESKTOP_STATS if platform == "desktop" else TABLET_STATS
    if condition not in stats:
        raise UsageError(f"no preset profile for {condition} on {platform}")
    mean, mad = stats[condition]
    return ConditionProfile(
        condition=condition,
        mean_deg=mean,
        mad_deg=mad,
        gradient=_GRADIENT_BY_CONDITION.get(condition, "uniform"),
        spread_frac=spread_frac,
    )


def _aoi_weights(profile: ConditionProfile, grid, screen: ScreenConfig, z: float) -> np.ndarray:
    """Relative error level per AOI before calibration."""
    g = profile.gradient_strength
    if profile.gradient == "uniform":
        return np.ones(N_AOI)
    cols = np.tile(np.arange(AOI_COLS), AOI_ROWS)
    rows = np.repeat(np.arange(AOI_ROWS), AOI_COLS)
    if profile.gradient == "yaw":
        return 1.0 + g * (cols - (AOI_COLS - 1) / 2) / ((AOI_COLS - 1) / 2)
    if profile.gradient == "pitch":
        return 1.0 + g * (rows - (AOI_ROWS - 1) / 2) / ((AOI_ROWS - 1) / 2)
    ox, oy = screen.origin
    ecc = np.array(
        [math.hypot((x - ox) * screen.pixel_pitch_mu, (y - oy) * screen.pixel_pitch_mu)
         for x, y in grid]
    )
    top = ecc.max()
    return 1.0 + (g * ecc / top if top > 0 else 0.0)


def _mad_of(x: np.ndarray) -> float:
    return float(np.median(np.abs(x - np.median(x))))


def synth_session(
    profile: ConditionProfile,
    screen: ScreenConfig,
    meta: SessionMeta,
    seed: int,
    samples_per_aoi: int = 41,
    sample_rate_hz: float = 30.0,
    margin_frac: float = 0.1,
    disparity_px: float = 1.0,
) -> GazeSession:
    """Generate one session whose frontal errors hit the profile targets.

    The raw offset field is the AOI gradient plus pink-noise jitter,
    affinely rescaled to the exact target mean and MAD (optionally jittered
    per session by ``spread_frac``), then inverted through the angle
    equations: each gaze point is placed on the ray from the origin through
    its AOI so that its frontal eccentricity equals target + offset.
    """
    rng = np.random.default_rng(seed)
    grid = make_aoi_grid(screen, margin_frac)
    z = meta.user_distance_z
    n = N_AOI * samples_per_aoi

    target_mean = profile.mean_deg
    target_mad = profile.mad_deg
    if profile.spread_frac > 0:
        target_mean *= 1.0 + profile.spread_frac * rng.uniform(-1, 1)
        target_mad *= 1.0 + profile.spread_frac * rng.uniform(-1, 1)

    weights = _aoi_weights(profile, grid, screen, z)
    jitter = pink_noise(n, 0.8, 0.35, rng.integers(0, 2**63 - 1),
                        sample_rate_hz=sample_rate_hz)
    raw = np.repeat(weights, samples_per_aoi) + jitter
    spread = _mad_of(raw)
    scale = target_mad / spread if spread > 0 else 0.0
    offsets_deg = (raw - raw.mean()) * scale + target_mean

    dt_ms = max(1, int(round(1000.0 / sample_rate_hz)))
    ox, oy = screen.origin
    mu = screen.pixel_pitch_mu
    records: list[GazeRecord] = []
    for i in range(n):
        aoi = i // samples_per_aoi  # 0-based
        gx, gy = grid[aoi]
        ax, ay = gx - ox, gy - oy
        r_px = math.hypot(ax, ay)
        if r_px > 0:
            ux, uy = ax / r_px, ay / r_px
        else:
            ux, uy = 1.0, 0.0
        theta_gt = math.atan(mu * r_px / z)
        theta = theta_gt + math.radians(offsets_deg[i])
        gaze_r_px = z * math.tan(theta) / mu
        px = ux * gaze_r_px + ox
        py = uy * gaze_r_px + oy
        records.append(
            GazeRecord(
                timestamp_ms=i * dt_ms,
                left_x=px - disparity_px,
                left_y=py,
                right_x=px + disparity_px,
                right_y=py,
                aoi_id=aoi + 1,
                gt_x=gx,
                gt_y=gy,
            )
        )
    return GazeSession(meta=meta, screen=screen, records=records, aoi_grid=grid)


def synth_task_sessions(
    task: str,
    participants: int = 20,
    seed: int = 0,
    platform: str = "desktop",
    spread_frac: float = 0.08,
    samples_per_aoi: int = 41,
) -> list[GazeSession]:
    """Sessions for every condition of a classification task.

    Participant P01..Pnn each contribute one session per condition, with
    per-session seeds derived from the base seed.
    """
    conditions_by_task = {
        "user_distance": ("UD50", "UD60", "UD70", "UD80"),
        "head_pose": ("Neutral", "HeadRoll20", "HeadPitch20", "HeadYaw20"),
        "platform_pose": ("Neutral", "PlatRoll20", "PlatPitch20", "PlatYaw20"),
    }
    if task == "mixed":
        pose = conditions_by_task["head_pose" if platform == "desktop" else "platform_pose"]
        conditions = ("UD50", "UD60", "UD70", "UD80") + pose[1:]
    elif task in conditions_by_task:
        conditions = conditions_by_task[task]
    else:
        raise UsageError(f"unknown task {task!r}")
    if task == "platform_pose" and platform == "desktop":
        platform = "tablet"

    screen = DEFAULT_SCREEN if platform == "desktop" else TABLET_SCREEN
    distances = {"UD50": 500.0, "UD60": 600.0, "UD70": 700.0, "UD80": 800.0}
    sessions = []
    for p in range(participants):
        for c, condition in enumerate(conditions):
            meta = SessionMeta(
                participant_id=f"P{p + 1:02d}",
                platform=platform,
                condition=condition,
                user_distance_z=distances.get(condition, 600.0),
            )
            profile = profile_for(condition, platform, spread_frac=spread_frac)
            sessions.append(
                synth_session(
                    profile,
                    screen,
                    meta,
                    seed=seed + 10_000 * c + p,
                    samples_per_aoi=samples_per_aoi,
                )
            )
    return sessions

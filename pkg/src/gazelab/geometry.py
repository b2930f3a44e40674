"""Pixel-to-angle conversion and angular gaze errors.

The tracker reports gaze in screen pixels.  For analysis everything is
expressed as visual angles seen from the eye at distance ``z``: the frontal
eccentricity of a point, its horizontal (yaw) and vertical (pitch)
components, and the sample-wise differences between estimated gaze and the
target location.  Pixel offsets from the origin are converted to
millimetres with the display's pixel pitch before any angle is taken, so
the same formulas hold for the on-screen distance and for each axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import GazeRecord, GazeSession, ScreenConfig
from .errors import GazeDataError

CATEGORIES = ("frontal", "yaw", "pitch")


@dataclass(frozen=True)
class AngleSample:
    """Angles of one gaze point, in degrees."""

    theta_gaze: float
    theta_yaw: float
    theta_pitch: float
    timestamp_ms: int = 0


@dataclass
class ErrorSeries:
    """Per-sample angular errors of one session, channel per category."""

    frontal_err: np.ndarray
    yaw_err: np.ndarray
    pitch_err: np.ndarray
    aoi_ids: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        self.frontal_err = np.asarray(self.frontal_err, dtype=float)
        self.yaw_err = np.asarray(self.yaw_err, dtype=float)
        self.pitch_err = np.asarray(self.pitch_err, dtype=float)
        self.aoi_ids = np.asarray(self.aoi_ids, dtype=int)
        self.timestamps = np.asarray(self.timestamps, dtype=int)
        n = len(self.frontal_err)
        for arr in (self.yaw_err, self.pitch_err, self.aoi_ids, self.timestamps):
            if len(arr) != n:
                raise GazeDataError("error series channels must share one length")

    def __len__(self) -> int:
        return len(self.frontal_err)

    def channel(self, category: str) -> np.ndarray:
        if category == "frontal":
            return self.frontal_err
        if category == "yaw":
            return self.yaw_err
        if category == "pitch":
            return self.pitch_err
        raise GazeDataError(f"unknown error category {category!r}")

    def with_channels(self, frontal, yaw, pitch) -> "ErrorSeries":
        return ErrorSeries(frontal, yaw, pitch, self.aoi_ids.copy(), self.timestamps.copy())


def binocular_average(record: GazeRecord, screen: ScreenConfig) -> tuple[float, float]:
    """Average the two eyes and re-express the point relative to the origin."""
    if record.missing_channels():
        raise GazeDataError(
            f"record at t={record.timestamp_ms} has missing eye data; fill first"
        )
    gx = (record.left_x + record.right_x) / 2.0 - screen.origin[0]
    gy = (record.left_y + record.right_y) / 2.0 - screen.origin[1]
    return gx, gy


def to_angles(point: tuple[float, float], screen: ScreenConfig, z: float,
              timestamp_ms: int = 0) -> AngleSample:
    """Angles of an origin-centred pixel point viewed from distance ``z`` mm.

    The on-screen distance is ``mu * hypot(x, y)`` millimetres; the frontal
    angle is its arctangent over ``z``, and yaw/pitch apply the same
    conversion to each axis separately.
    """
    if z <= 0:
        raise GazeDataError("viewing distance must be positive")
    mu = screen.pixel_pitch_mu
    x, y = point
    osd_mm = mu * math.hypot(x, y)
    return AngleSample(
        theta_gaze=math.degrees(math.atan(osd_mm / z)),
        theta_yaw=math.degrees(math.atan(mu * x / z)),
        theta_pitch=math.degrees(math.atan(mu * y / z)),
        timestamp_ms=timestamp_ms,
    )


def gt_angles(aoi_point: tuple[float, float], screen: ScreenConfig, z: float,
              timestamp_ms: int = 0) -> AngleSample:
    """Ground-truth angles of a target point; same math as `to_angles`."""
    return to_angles(aoi_point, screen, z, timestamp_ms)


def compute_errors(session: GazeSession) -> ErrorSeries:
    """Angular deviation of gaze from target, per sample and per category.

    Requires a filled session (no missing coordinates).  The frontal error
    subtracts the target's frontal angle from the gaze frontal angle; yaw
    and pitch errors subtract the matching target components.
    """
    if not session.records:
        raise GazeDataError("session has no records")
    screen, z = session.screen, session.meta.user_distance_z
    n = len(session.records)
    frontal = np.empty(n)
    yaw = np.empty(n)
    pitch = np.empty(n)
    aois = np.empty(n, dtype=int)
    stamps = np.empty(n, dtype=int)
    ox, oy = screen.origin
    for i, rec in enumerate(session.records):
        gaze = binocular_average(rec, screen)
        est = to_angles(gaze, screen, z)
        ref = gt_angles((rec.gt_x - ox, rec.gt_y - oy), screen, z)
        frontal[i] = est.theta_gaze - ref.theta_gaze
        yaw[i] = est.theta_yaw - ref.theta_yaw
        pitch[i] = est.theta_pitch - ref.theta_pitch
        aois[i] = rec.aoi_id
        stamps[i] = rec.timestamp_ms
    return ErrorSeries(frontal, yaw, pitch, aois, stamps)


def grid_gt_angles(session: GazeSession) -> list[AngleSample]:
    """Ground-truth angles of each AOI in the session's grid (index = AOI - 1)."""
    ox, oy = session.screen.origin
    z = session.meta.user_distance_z
    return [
        gt_angles((x - ox, y - oy), session.screen, z)
        for x, y in session.aoi_grid
    ]

"""Session containers and the canonical on-disk CSV format.

A recording session is one participant looking at the 5x3 target grid under
one operating condition.  Raw files carry binocular pixel coordinates plus
per-sample ground truth; everything downstream (angles, errors, features)
is derived from the `GazeSession` built here.

Canonical CSV layout::

    # participant_id=P01
    # platform=desktop
    # condition=UD60
    # user_distance_mm=600.0
    # screen_width_px=1680
    # screen_height_px=1050
    # screen_diagonal_mm=558.8
    timestamp_ms,left_x,left_y,right_x,right_y,aoi_id,gt_x,gt_y
    0,812.3,400.1,815.2,402.8,1,168.0,105.0
    ...

Missing coordinates are empty fields or the literal ``NaN``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import GazeDataError, UsageError

PLATFORMS = ("desktop", "tablet")

CONDITIONS = (
    "UD50",
    "UD60",
    "UD70",
    "UD80",
    "HeadRoll20",
    "HeadPitch20",
    "HeadYaw20",
    "PlatRoll20",
    "PlatPitch20",
    "PlatYaw20",
    "Neutral",
)

N_AOI = 15
AOI_COLS = 5
AOI_ROWS = 3

_CSV_COLUMNS = "timestamp_ms,left_x,left_y,right_x,right_y,aoi_id,gt_x,gt_y"
_HEADER_KEYS = (
    "participant_id",
    "platform",
    "condition",
    "user_distance_mm",
    "screen_width_px",
    "screen_height_px",
    "screen_diagonal_mm",
)


def fmt_float(x: float) -> str:
    """Shortest decimal string that round-trips the value (repr semantics)."""
    return repr(float(x))


@dataclass(frozen=True)
class ScreenConfig:
    """Physical display description.

    ``origin`` is the pixel location, in the raw coordinate frame of the
    file, that angle computations treat as (0, 0).  For data recorded
    against a top-left origin this is the screen centre.
    """

    width_px: int
    height_px: int
    diagonal_mm: float
    pixel_pitch_mu: float  # mm per pixel
    origin: tuple[float, float]

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise UsageError("screen resolution must be positive")
        if self.pixel_pitch_mu <= 0:
            raise UsageError("pixel pitch must be positive")

    @classmethod
    def from_diagonal(
        cls,
        width_px: int,
        height_px: int,
        diagonal_mm: float,
        origin: tuple[float, float] | None = None,
    ) -> "ScreenConfig":
        """Derive the pixel pitch from the diagonal size in millimetres."""
        if diagonal_mm <= 0:
            raise UsageError("diagonal_mm must be positive")
        diag_px = math.sqrt(width_px**2 + height_px**2)
        mu = diagonal_mm / diag_px
        if origin is None:
            origin = (width_px / 2.0, height_px / 2.0)
        return cls(width_px, height_px, diagonal_mm, mu, origin)


@dataclass(frozen=True)
class SessionMeta:
    participant_id: str
    platform: str
    condition: str
    user_distance_z: float  # mm, eye to screen

    def __post_init__(self):
        if self.platform not in PLATFORMS:
            raise UsageError(f"unknown platform {self.platform!r}")
        if self.condition not in CONDITIONS:
            raise UsageError(f"unknown condition {self.condition!r}")
        if self.user_distance_z <= 0:
            raise UsageError("user distance must be positive")
        # the named conditions were all recorded between 50 and 80 cm
        if not (500.0 <= self.user_distance_z <= 800.0):
            raise UsageError(
                f"user distance {self.user_distance_z} mm outside the tracked "
                f"range [500, 800] for condition {self.condition}"
            )


@dataclass
class GazeRecord:
    """One tracker sample; eye coordinates may be missing."""

    timestamp_ms: int
    left_x: float | None
    left_y: float | None
    right_x: float | None
    right_y: float | None
    aoi_id: int
    gt_x: float
    gt_y: float

    def missing_channels(self) -> tuple[str, ...]:
        return tuple(
            name
            for name in ("left_x", "left_y", "right_x", "right_y")
            if getattr(self, name) is None
        )


@dataclass
class GazeSession:
    meta: SessionMeta
    screen: ScreenConfig
    records: list[GazeRecord]
    aoi_grid: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.aoi_grid) != N_AOI:
            raise GazeDataError(
                f"AOI grid must have {N_AOI} points, got {len(self.aoi_grid)}"
            )
        last_ts = None
        for i, rec in enumerate(self.records):
            if not (1 <= rec.aoi_id <= N_AOI):
                raise GazeDataError(f"record {i}: aoi_id {rec.aoi_id} out of range 1..{N_AOI}")
            if last_ts is not None and rec.timestamp_ms < last_ts:
                raise GazeDataError(f"record {i}: timestamps decrease")
            last_ts = rec.timestamp_ms

    def __len__(self) -> int:
        return len(self.records)


def make_aoi_grid(screen: ScreenConfig, margin_frac: float = 0.1) -> list[tuple[float, float]]:
    """Place the 15 target points on a 5x3 grid inside the given margins.

    Points are returned row-major: AOI 1 is top-left, AOI 8 the screen
    centre, AOI 15 bottom-right.  Columns span ``margin_frac * width`` to
    ``(1 - margin_frac) * width`` with equal spacing (rows likewise);
    coordinates are clipped to the addressable pixel range, which only
    matters at margin 0.
    """
    if not (0 <= margin_frac < 0.5):
        raise UsageError("margin_frac must be in [0, 0.5)")
    w, h = screen.width_px, screen.height_px
    xs = [margin_frac * w + j * (1 - 2 * margin_frac) * w / (AOI_COLS - 1) for j in range(AOI_COLS)]
    ys = [margin_frac * h + i * (1 - 2 * margin_frac) * h / (AOI_ROWS - 1) for i in range(AOI_ROWS)]
    xs = [min(max(x, 0.0), w - 1.0) for x in xs]
    ys = [min(max(y, 0.0), h - 1.0) for y in ys]
    return [(x, y) for y in ys for x in xs]


def _parse_optional(token: str, row: int, col: str) -> float | None:
    token = token.strip()
    if token == "" or token.lower() == "nan":
        return None
    try:
        return float(token)
    except ValueError:
        raise GazeDataError(f"row {row}: cannot parse {col}={token!r}") from None


def _parse_required(token: str, row: int, col: str) -> float:
    value = _parse_optional(token, row, col)
    if value is None:
        raise GazeDataError(f"row {row}: {col} must not be missing")
    return value


def load_session(
    path: str | Path,
    screen: ScreenConfig | None = None,
    meta: SessionMeta | None = None,
) -> GazeSession:
    """Read a canonical session CSV.

    ``screen`` and ``meta`` override whatever the file header carries; when
    omitted they are rebuilt from the ``# key=value`` header lines.  Missing
    eye coordinates stay missing (``None``) so `fill_missing` can treat them
    explicitly.  The AOI grid is the default 5x3 layout for the screen,
    overridden wherever the file's ground-truth columns pin an AOI.
    """
    path = Path(path)
    if not path.exists():
        raise GazeDataError(f"no such session file: {path}")
    header: dict[str, str] = {}
    records: list[GazeRecord] = []
    gt_by_aoi: dict[int, tuple[float, float]] = {}
    saw_columns = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    header[key.strip()] = value.strip()
                continue
            if not saw_columns:
                if line.strip() != _CSV_COLUMNS:
                    raise GazeDataError(
                        f"row {lineno}: expected column header {_CSV_COLUMNS!r}"
                    )
                saw_columns = True
                continue
            parts = line.split(",")
            if len(parts) != 8:
                raise GazeDataError(f"row {lineno}: expected 8 fields, got {len(parts)}")
            ts = _parse_required(parts[0], lineno, "timestamp_ms")
            aoi = _parse_required(parts[5], lineno, "aoi_id")
            if aoi != int(aoi) or not (1 <= int(aoi) <= N_AOI):
                raise GazeDataError(f"row {lineno}: aoi_id {parts[5]} out of range 1..{N_AOI}")
            rec = GazeRecord(
                timestamp_ms=int(ts),
                left_x=_parse_optional(parts[1], lineno, "left_x"),
                left_y=_parse_optional(parts[2], lineno, "left_y"),
                right_x=_parse_optional(parts[3], lineno, "right_x"),
                right_y=_parse_optional(parts[4], lineno, "right_y"),
                aoi_id=int(aoi),
                gt_x=_parse_required(parts[6], lineno, "gt_x"),
                gt_y=_parse_required(parts[7], lineno, "gt_y"),
            )
            seen = gt_by_aoi.get(rec.aoi_id)
            if seen is not None and (abs(seen[0] - rec.gt_x) > 1e-6 or abs(seen[1] - rec.gt_y) > 1e-6):
                raise GazeDataError(
                    f"row {lineno}: aoi_id {rec.aoi_id} has inconsistent ground truth"
                )
            gt_by_aoi[rec.aoi_id] = (rec.gt_x, rec.gt_y)
            records.append(rec)
    if not saw_columns:
        raise GazeDataError(f"{path}: missing column header line")

    if screen is None:
        try:
            screen = ScreenConfig.from_diagonal(
                int(header["screen_width_px"]),
                int(header["screen_height_px"]),
                float(header["screen_diagonal_mm"]),
            )
        except KeyError as exc:
            raise GazeDataError(f"{path}: header missing {exc.args[0]}") from None
    if meta is None:
        try:
            meta = SessionMeta(
                participant_id=header["participant_id"],
                platform=header["platform"],
                condition=header["condition"],
                user_distance_z=float(header["user_distance_mm"]),
            )
        except KeyError as exc:
            raise GazeDataError(f"{path}: header missing {exc.args[0]}") from None

    grid = make_aoi_grid(screen)
    for aoi_id, point in gt_by_aoi.items():
        grid[aoi_id - 1] = point
    return GazeSession(meta=meta, screen=screen, records=records, aoi_grid=grid)


def save_session(session: GazeSession, path: str | Path) -> None:
    """Write the canonical CSV; `load_session` of the result round-trips."""
    meta, screen = session.meta, session.screen
    values = {
        "participant_id": meta.participant_id,
        "platform": meta.platform,
        "condition": meta.condition,
        "user_distance_mm": fmt_float(meta.user_distance_z),
        "screen_width_px": str(screen.width_px),
        "screen_height_px": str(screen.height_px),
        "screen_diagonal_mm": fmt_float(screen.diagonal_mm),
    }
    lines = [f"# {key}={values[key]}" for key in _HEADER_KEYS]
    lines.append(_CSV_COLUMNS)
    for rec in session.records:
        eye = [
            "" if v is None else fmt_float(v)
            for v in (rec.left_x, rec.left_y, rec.right_x, rec.right_y)
        ]
        lines.append(
            f"{rec.timestamp_ms},{eye[0]},{eye[1]},{eye[2]},{eye[3]},"
            f"{rec.aoi_id},{fmt_float(rec.gt_x)},{fmt_float(rec.gt_y)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _segments(records: list[GazeRecord]) -> list[tuple[int, int]]:
    """Contiguous runs of equal aoi_id, as (start, stop) index pairs."""
    runs = []
    start = 0
    for i in range(1, len(records) + 1):
        if i == len(records) or records[i].aoi_id != records[start].aoi_id:
            runs.append((start, i))
            start = i
    return runs


def fill_missing(session: GazeSession) -> GazeSession:
    """Replace missing coordinates with the mean of their dwell segment.

    Each coordinate channel (left_x .. right_y) is filled from the mean of
    the present values inside the same contiguous AOI segment; a segment
    with no usable values falls back to the whole-session channel mean.  A
    channel missing everywhere is unrecoverable and raises.  The input
    session is left untouched; filling an already complete session is the
    identity.
    """
    channels = ("left_x", "left_y", "right_x", "right_y")
    session_mean: dict[str, float] = {}
    for ch in channels:
        present = [getattr(r, ch) for r in session.records if getattr(r, ch) is not None]
        if not present:
            raise GazeDataError(f"channel {ch} has no data anywhere in the session")
        session_mean[ch] = sum(present) / len(present)

    new_records = [replace(r) for r in session.records]
    for start, stop in _segments(new_records):
        seg = new_records[start:stop]
        for ch in channels:
            present = [getattr(r, ch) for r in seg if getattr(r, ch) is not None]
            fill = sum(present) / len(present) if present else session_mean[ch]
            for r in seg:
                if getattr(r, ch) is None:
                    setattr(r, ch, fill)
    return GazeSession(
        meta=session.meta,
        screen=session.screen,
        records=new_records,
        aoi_grid=list(session.aoi_grid),
    )

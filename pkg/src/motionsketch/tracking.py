"""Sparse point tracks: ingestion, motion weights, heatmap, and motion transfer.

A track set stores per-frame 2-D coordinates for a few thousand sample points.
It powers two things: the motion heatmap that biases stroke seeding toward
moving regions, and the sparse-to-dense transfer that predicts where an
arbitrary pixel of frame i lands in frame t by borrowing the displacement of
its nearest tracked point.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParseError, ValidationError

# Below this many tracked points a vectorized scan beats building KD-trees.
_KDTREE_MIN_POINTS = 256

# Stabilizer in the Shepard denominator: far from every site the interpolant
# decays to 0 instead of being 0/0, and a single site still yields a peak.
_SHEPARD_EPS = 1e-12


@dataclass(frozen=True)
class TrackSet:
    """Immutable set of tracked sample points, coords shape (K, N_f, 2)."""

    ids: np.ndarray
    coords: np.ndarray
    _trees: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = np.ascontiguousarray(np.asarray(self.ids, dtype=np.int64))
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if ids.ndim != 1 or ids.size < 1:
            raise ValidationError("track set needs at least one point")
        if coords.ndim != 3 or coords.shape[0] != ids.size or coords.shape[2] != 2:
            raise ValidationError(
                f"coords must have shape (num_points, num_frames, 2), got {coords.shape}"
            )
        if np.unique(ids).size != ids.size:
            raise ValidationError("track point ids must be unique")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("track coordinates must be finite")
        ids.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_row_of", {int(p): k for k, p in enumerate(ids)})

    @property
    def num_points(self) -> int:
        return self.ids.size

    @property
    def num_frames(self) -> int:
        return self.coords.shape[1]

    def row_of(self, point_id: int) -> int:
        try:
            return self._row_of[int(point_id)]
        except KeyError:
            raise LookupError(f"unknown track point id {point_id}") from None

    def _tree(self, frame: int) -> cKDTree:
        # Lazy per-frame cache; concurrent first queries may build a tree
        # twice, both results are equivalent and the dict update is atomic.
        tree = self._trees.get(frame)
        if tree is None:
            tree = cKDTree(self.coords[:, frame, :])
            self._trees[frame] = tree
        return tree


@dataclass(frozen=True)
class MotionHeatmap:
    """Per-pixel normalized motion magnitude in [0, 1], values shape (H, W)."""

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.shape != (self.height, self.width):
            raise ValidationError(
                f"heatmap values must have shape (H, W)=({self.height}, {self.width}), "
                f"got {values.shape}"
            )
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValidationError("heatmap values must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _tracks_from_mapping(points: dict[int, list]) -> TrackSet:
    if not points:
        raise ValidationError("no points in track file")
    lengths = {pid: len(xy) for pid, xy in points.items()}
    distinct = set(lengths.values())
    if len(distinct) != 1:
        bad = min(pid for pid, n in lengths.items() if n != max(distinct))
        raise ValidationError(
            f"ragged track: point id {bad} has {lengths[bad]} frames, others differ"
        )
    ids = sorted(points)
    coords = np.array([points[pid] for pid in ids], dtype=np.float64)
    return TrackSet(ids=np.array(ids), coords=coords)


def _load_tracks_json(path: str) -> TrackSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.strip():
        raise ValidationError("no points: track file is empty")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        num_frames = int(doc["num_frames"])
        entries = doc["points"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: expected object with 'num_frames' and 'points'") from exc
    points: dict[int, list] = {}
    for entry in entries:
        try:
            pid = int(entry["id"])
            xy = entry["xy"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{path}: each point needs 'id' and 'xy'") from exc
        if pid in points:
            raise ValidationError(f"duplicate point id {pid}")
        if len(xy) != num_frames:
            raise ValidationError(
                f"ragged track: point id {pid} has {len(xy)} frames, expected {num_frames}"
            )
        points[pid] = xy
    return _tracks_from_mapping(points)


def _load_tracks_csv(path: str) -> TrackSet:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError("no points: track file is empty")
        expected = ["frame", "point_id", "x", "y"]
        if [h.strip() for h in header[:4]] != expected:
            raise ParseError(f"{path}: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((int(row[0]), int(row[1]), float(row[2]), float(row[3])))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise ValidationError("no points: track file has no data rows")
    ids = sorted({r[1] for r in rows})
    if len(rows) % len(ids) != 0:
        raise ValidationError(
            f"row count {len(rows)} is not divisible by point count {len(ids)}"
        )
    num_frames = len(rows) // len(ids)
    coords = np.full((len(ids), num_frames, 2), np.nan)
    row_of = {pid: k for k, pid in enumerate(ids)}
    for frame, pid, x, y in rows:
        if not (0 <= frame < num_frames):
            raise ValidationError(f"frame index {frame} outside 0..{num_frames - 1}")
        coords[row_of[pid], frame] = (x, y)
    if np.any(np.isnan(coords)):
        missing = ids[int(np.argwhere(np.isnan(coords[:, :, 0]))[0][0])]
        raise ValidationError(f"point id {missing} is missing one or more frames")
    return TrackSet(ids=np.array(ids), coords=coords)


def load_tracks(path: str, format: str | None = None) -> TrackSet:
    """Load a validated track set from a JSON or CSV file.

    `format` is "json" or "csv"; when omitted it is inferred from the file
    extension. Visibility/occlusion fields are accepted but ignored.
    """
    if format is None:
        format = "csv" if str(path).lower().endswith(".csv") else "json"
    if format == "json":
        return _load_tracks_json(path)
    if format == "csv":
        return _load_tracks_csv(path)
    raise ValidationError(f"unknown track format {format!r} (expected 'json' or 'csv')")


def save_tracks(tracks: TrackSet, path: str) -> None:
    """Write a track set in the JSON track format."""
    doc = {
        "num_frames": tracks.num_frames,
        "points": [
            {"id": int(pid), "xy": tracks.coords[k].tolist()}
            for k, pid in enumerate(tracks.ids)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def motion_weight(tracks: TrackSet, point_id: int) -> float:
    """Square root of the summed per-step Euclidean displacement of one point."""
    row = tracks.row_of(point_id)
    steps = np.linalg.norm(np.diff(tracks.coords[row], axis=0), axis=1)
    return float(np.sqrt(np.sum(steps)))


def motion_weights(tracks: TrackSet) -> np.ndarray:
    """Motion weights for all points, ordered like ``tracks.ids``."""
    steps = np.linalg.norm(np.diff(tracks.coords, axis=1), axis=2)
    return np.sqrt(np.sum(steps, axis=1))


def build_motion_heatmap(
    tracks: TrackSet,
    width: int,
    height: int,
    bandwidth: float | None = None,
    site_frame: int = 0,
) -> MotionHeatmap:
    """Gaussian-kernel Shepard interpolation of motion weights over the canvas.

    Sites are the tracked positions in `site_frame` (frame 0 by default).
    Default bandwidth is 0.05 * max(width, height). The result is min-max
    normalized to [0, 1]; if all motion weights are equal the map is all zero.
    """
    if width < 1 or height < 1:
        raise ValidationError(f"canvas must be at least 1x1, got {width}x{height}")
    if bandwidth is None:
        bandwidth = 0.05 * max(width, height)
    if bandwidth <= 0:
        raise ValidationError(f"bandwidth must be positive, got {bandwidth}")
    weights = motion_weights(tracks)
    sites = tracks.coords[:, site_frame, :]
    xs = np.arange(width) + 0.5
    values = np.empty((height, width))
    inv = 1.0 / (2.0 * bandwidth * bandwidth)
    for y in range(height):
        centers = np.stack([xs, np.full(width, y + 0.5)], axis=1)
        d2 = np.sum((centers[:, None, :] - sites[None, :, :]) ** 2, axis=2)
        kernels = np.exp(-d2 * inv)
        denom = kernels.sum(axis=1)
        values[y] = (kernels @ weights) / (denom + _SHEPARD_EPS)
    lo, hi = values.min(), values.max()
    if hi == lo:
        # No spatial variation (e.g. every tracked point is static): all zero.
        return MotionHeatmap(width=width, height=height, values=np.zeros((height, width)))
    return MotionHeatmap(width=width, height=height, values=(values - lo) / (hi - lo))


def nearest_rows(points: np.ndarray, frame: int, tracks: TrackSet) -> np.ndarray:
    """Row indices of the nearest tracked point for each query (batched).

    Uses a per-frame KD-tree once the track set is large; small sets use a
    vectorized scan whose argmin picks the lowest row (= lowest id) on ties.
    """
    points = np.asarray(points, dtype=np.float64)
    flat = points.reshape(-1, 2)
    if tracks.num_points >= _KDTREE_MIN_POINTS:
        _, rows = tracks._tree(frame).query(flat)
    else:
        d2 = np.sum((flat[:, None, :] - tracks.coords[None, :, frame, :]) ** 2, axis=2)
        rows = np.argmin(d2, axis=1)
    return rows.reshape(points.shape[:-1])


def nearest_sample(p: np.ndarray, i: int, tracks: TrackSet) -> int:
    """Id of the tracked point nearest to p in frame i; ties go to the lowest id."""
    if not (0 <= i < tracks.num_frames):
        raise ValidationError(f"frame index {i} outside 0..{tracks.num_frames - 1}")
    p = np.asarray(p, dtype=np.float64)
    d2 = np.sum((tracks.coords[:, i, :] - p) ** 2, axis=1)
    return int(tracks.ids[int(np.argmin(d2))])


def transfer_point(p: np.ndarray, i: int, t: int, tracks: TrackSet) -> np.ndarray:
    """Predicted position in frame t of the pixel at p in frame i.

    The pixel keeps its offset to the nearest tracked point:
    p - (nearest point in frame i) + (that point's position in frame t).
    Grouped as p + (displacement of the nearest point), so t = i returns p
    exactly.
    """
    if not (0 <= i < tracks.num_frames and 0 <= t < tracks.num_frames):
        raise ValidationError("frame indices outside the track range")
    p = np.asarray(p, dtype=np.float64)
    row = tracks.row_of(nearest_sample(p, i, tracks))
    return p + (tracks.coords[row, t] - tracks.coords[row, i])

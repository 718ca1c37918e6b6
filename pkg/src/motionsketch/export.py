"""Model files, SVG export, and continuous-time frame-rate resampling.

The model file is JSON (format_version 1) carrying everything needed to
re-evaluate the animation: canvas, widths, and per-stroke trajectory
coefficients. Per-frame and animated exports share one path-data builder, so
the k-th key geometry of an animated SVG is byte-identical to the standalone
frame export at the same time. Numbers are written with 6 decimals,
locale-independent.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .bernstein import BasisKind, basis_matrix, solve_control_points
from .errors import DomainError, ParseError, UnsupportedVersionError, ValidationError
from .trajectory import (
    SketchAnimation,
    Stroke,
    TrajectoryPoly,
    eval_curve_point,
    eval_trajectory,
)

FORMAT_VERSION = 1

_KNOWN_FIELDS = {"format_version", "canvas", "num_frames", "widths", "strokes"}
_KNOWN_STROKE_FIELDS = {"basis", "curve_degree", "trajectory_degree", "control_trajectories"}

# Exact piecewise-cubic conversion is impossible above degree 3; subdivision
# stops once the parsed-back curve is well inside the 1e-5 render/eval budget.
_SUBDIVISION_TOLERANCE = 5e-7

# Collocation nodes used to pass a cubic through four on-curve points.
_CUBIC_NODES = np.array([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])


@dataclass(frozen=True)
class FrameRatePlan:
    """Output frame times in [0, 1] for resampling an animation."""

    input_fps: float
    output_fps: float
    output_frame_times: np.ndarray

    def __post_init__(self):
        times = np.ascontiguousarray(np.asarray(self.output_frame_times, dtype=np.float64))
        if times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValidationError("output times must be strictly increasing")
        if abs(times[0]) > 1e-12 or abs(times[-1] - 1.0) > 1e-12:
            raise ValidationError("output times must start at 0 and end at 1")
        times.setflags(write=False)
        object.__setattr__(self, "output_frame_times", times)

    @property
    def num_output_frames(self) -> int:
        return self.output_frame_times.size

    @property
    def duration_seconds(self) -> float:
        return self.num_output_frames / self.output_fps


def model_document(anim: SketchAnimation) -> dict:
    """The JSON-serializable model document for an animation."""
    return {
        "format_version": FORMAT_VERSION,
        "canvas": [anim.canvas[0], anim.canvas[1]],
        "num_frames": anim.num_frames,
        "widths": anim.widths.tolist(),
        "strokes": [
            {
                "basis": stroke.basis.value,
                "curve_degree": stroke.curve_degree,
                "trajectory_degree": stroke.trajectory_degree,
                "control_trajectories": [
                    traj.coeffs.tolist() for traj in stroke.control_trajectories
                ],
            }
            for stroke in anim.strokes
        ],
    }


def save_model(anim: SketchAnimation, path: str) -> dict:
    doc = model_document(anim)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return doc


def load_model(path: str) -> SketchAnimation:
    """Load a model file; unknown fields are ignored with a warning."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: model document must be a JSON object")
    version = doc.get("format_version")
    if not isinstance(version, int):
        raise ParseError(f"{path}: missing integer format_version")
    if version > FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: format_version {version} is newer than supported {FORMAT_VERSION}"
        )
    unknown = set(doc) - _KNOWN_FIELDS
    if unknown:
        warnings.warn(f"{path}: ignoring unknown model fields {sorted(unknown)}")
    try:
        canvas = (int(doc["canvas"][0]), int(doc["canvas"][1]))
        num_frames = int(doc["num_frames"])
        widths = np.asarray(doc["widths"], dtype=np.float64)
        strokes = []
        for entry in doc["strokes"]:
            stroke_unknown = set(entry) - _KNOWN_STROKE_FIELDS
            if stroke_unknown:
                warnings.warn(
                    f"{path}: ignoring unknown stroke fields {sorted(stroke_unknown)}"
                )
            kind = BasisKind(entry["basis"])
            trajs = tuple(
                TrajectoryPoly(kind, np.asarray(coeffs, dtype=np.float64))
                for coeffs in entry["control_trajectories"]
            )
            strokes.append(Stroke(trajs))
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"{path}: malformed model document: {exc!r}") from exc
    return SketchAnimation(
        strokes=tuple(strokes), num_frames=num_frames, canvas=canvas, widths=widths
    )


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _fmt_point(point: np.ndarray) -> str:
    return f"{_fmt(point[0])},{_fmt(point[1])}"


def _piecewise_cubics(stroke: Stroke, t: float) -> list[np.ndarray]:
    """Approximate a degree-m>3 stroke at time t by cubics through on-curve points.

    Segment endpoints (and the two interior collocation points defining each
    cubic) lie exactly on the curve; segment count doubles until the parsed
    curve deviates less than the subdivision tolerance.
    """
    m = stroke.curve_degree
    segments = max(2, (m + 2) // 3)
    check_u = np.linspace(0.0, 1.0, 9)
    check_rows = basis_matrix(BasisKind.BERNSTEIN, 3, check_u)
    while True:
        cuts = np.linspace(0.0, 1.0, segments + 1)
        cubics = []
        worst = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            local_u = a + (b - a) * _CUBIC_NODES
            on_curve = np.stack([eval_curve_point(stroke, u, t) for u in local_u])
            ctrl = solve_control_points(on_curve, _CUBIC_NODES)
            exact = np.stack(
                [eval_curve_point(stroke, a + (b - a) * u, t) for u in check_u]
            )
            worst = max(worst, float(np.max(np.abs(check_rows @ ctrl - exact))))
            cubics.append(ctrl)
        if worst <= _SUBDIVISION_TOLERANCE or segments >= 1024:
            return cubics
        segments *= 2


def stroke_path_data(stroke: Stroke, t: float) -> str:
    """SVG path `d` for the stroke at time t (L/Q/C for m = 1/2/3, cubics above)."""
    points = np.stack([eval_trajectory(traj, t) for traj in stroke.control_trajectories])
    m = stroke.curve_degree
    if m == 1:
        return f"M {_fmt_point(points[0])} L {_fmt_point(points[1])}"
    if m == 2:
        return (
            f"M {_fmt_point(points[0])} Q {_fmt_point(points[1])} {_fmt_point(points[2])}"
        )
    if m == 3:
        return (
            f"M {_fmt_point(points[0])} C {_fmt_point(points[1])} "
            f"{_fmt_point(points[2])} {_fmt_point(points[3])}"
        )
    cubics = _piecewise_cubics(stroke, t)
    parts = [f"M {_fmt_point(cubics[0][0])}"]
    for ctrl in cubics:
        parts.append(f"C {_fmt_point(ctrl[1])} {_fmt_point(ctrl[2])} {_fmt_point(ctrl[3])}")
    return " ".join(parts)


def width_at(anim: SketchAnimation, t: float) -> float:
    """Stroke width at time t: linear interpolation of the per-frame schedule."""
    return float(np.interp(t, anim.frame_times(), anim.widths))


def _check_time(t: float) -> None:
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t!r}")


def render_frame_svg(anim: SketchAnimation, t: float) -> str:
    """One SVG document showing the animation at time t."""
    _check_time(t)
    w, h = anim.canvas
    width = _fmt(width_at(anim, t))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
    ]
    for stroke in anim.strokes:
        lines.append(
            f'  <path d="{stroke_path_data(stroke, t)}" fill="none" stroke="black" '
            f'stroke-width="{width}" stroke-linecap="round"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_frame_svg(anim: SketchAnimation, t: float, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(render_frame_svg(anim, t))


def render_animated_svg(anim: SketchAnimation, plan: FrameRatePlan) -> str:
    """One SVG whose paths morph through the plan's key times.

    Each key's path data equals the per-frame export at the same t.
    """
    w, h = anim.canvas
    times = plan.output_frame_times
    key_times = ";".join(_fmt(t) for t in times)
    duration = _fmt(plan.duration_seconds)
    widths = [_fmt(width_at(anim, t)) for t in times]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
    ]
    for stroke in anim.strokes:
        keys = [stroke_path_data(stroke, t) for t in times]
        lines.append(
            f'  <path d="{keys[0]}" fill="none" stroke="black" '
            f'stroke-width="{widths[0]}" stroke-linecap="round">'
        )
        lines.append(
            f'    <animate attributeName="d" dur="{duration}s" repeatCount="indefinite" '
            f'calcMode="linear" keyTimes="{key_times}" values="{";".join(keys)}"/>'
        )
        lines.append(
            f'    <animate attributeName="stroke-width" dur="{duration}s" '
            f'repeatCount="indefinite" calcMode="linear" keyTimes="{key_times}" '
            f'values="{";".join(widths)}"/>'
        )
        lines.append("  </path>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_animated_svg(anim: SketchAnimation, plan: FrameRatePlan, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(render_animated_svg(anim, plan))


def resample_framerate(
    anim: SketchAnimation, input_fps: float, output_fps: float
) -> FrameRatePlan:
    """Uniform output times with the endpoint-preserving frame count
    round((N_f - 1) * output_fps / input_fps) + 1."""
    if input_fps <= 0 or output_fps <= 0:
        raise DomainError("frame rates must be positive")
    count = int(round((anim.num_frames - 1) * output_fps / input_fps)) + 1
    return FrameRatePlan(
        input_fps=float(input_fps),
        output_fps=float(output_fps),
        output_frame_times=np.linspace(0.0, 1.0, count),
    )

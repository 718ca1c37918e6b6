"""Loss functions with analytic gradients and the trajectory optimizer.

Both losses are sums of squared distances between points that are linear in
the trajectory coefficients, so their gradients are exact. The one nonlinearity
is the nearest-tracked-point assignment inside the consistency loss; it is
piecewise constant, so it is recomputed once per iteration and *frozen* during
each gradient evaluation, which makes the gradient exact almost everywhere.

Per-frame contributions are accumulated one source frame at a time and the
intermediate residual buffers are released between frames, keeping peak memory
independent of how the frame count scales the pairwise (i, t) expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bernstein import BasisKind, basis_matrix, basis_row
from .errors import DivergenceError, ValidationError
from .tracking import TrackSet, nearest_rows
from .trajectory import SketchAnimation, animation_coefficients, replace_coefficients


@dataclass(frozen=True)
class LossWeights:
    """Weights of the attachment (w_s), reserved geometry (w_g) and consistency
    (w_c) terms of the total loss."""

    w_s: float = 1.0
    w_g: float = 0.0
    w_c: float = 0.5

    def __post_init__(self):
        if self.w_s < 0 or self.w_g < 0 or self.w_c < 0:
            raise ValidationError("loss weights must be nonnegative")
        if self.w_s == 0 and self.w_g == 0 and self.w_c == 0:
            raise ValidationError("at least one loss weight must be positive")


@dataclass(frozen=True)
class OptimConfig:
    iterations: int
    step_size: float = 0.1
    moment_decay_1: float = 0.9
    moment_decay_2: float = 0.999
    n_p: int = 8
    epsilon: float = 1e-8
    log_every: int = 10

    def __post_init__(self):
        if self.iterations < 1:
            raise ValidationError("need at least one iteration")
        if self.n_p < 2:
            raise ValidationError("need at least two sample points per stroke")
        if not (0.0 < self.moment_decay_1 < 1.0 and 0.0 < self.moment_decay_2 < 1.0):
            raise ValidationError("moment decays must lie in (0, 1)")
        if self.step_size < 0 or self.epsilon <= 0 or self.log_every < 1:
            raise ValidationError("bad step size, epsilon, or log interval")


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    consistency: float
    attachment: float
    geometry: float = 0.0
    history: tuple = ()
    component_history: tuple = field(default=(), repr=False)


def _stroke_bases(anim: SketchAnimation, n_p: int):
    """(B_t, B_u): trajectory-basis rows at frame times, curve rows at the u grid."""
    first = anim.strokes[0]
    b_t = basis_matrix(first.basis, first.trajectory_degree, anim.frame_times())
    u = np.linspace(0.0, 1.0, n_p)
    b_u = basis_matrix(BasisKind.BERNSTEIN, first.curve_degree, u)
    return b_t, b_u


def _curve_samples(q: np.ndarray, b_t: np.ndarray, b_u: np.ndarray) -> np.ndarray:
    """Sampled stroke points, shape (N_f, N_s, N_p, 2)."""
    return np.einsum("fb,ka,jabc->fjkc", b_t, b_u, q)


def _validate_tracks(anim: SketchAnimation, tracks: TrackSet) -> None:
    if tracks.num_frames != anim.num_frames:
        raise ValidationError(
            f"track frames ({tracks.num_frames}) != animation frames ({anim.num_frames})"
        )


def consistency_assignments(
    anim: SketchAnimation, tracks: TrackSet, n_p: int
) -> np.ndarray:
    """Nearest tracked-point row per sampled stroke point, shape (N_f, N_s, N_p)."""
    _validate_tracks(anim, tracks)
    b_t, b_u = _stroke_bases(anim, n_p)
    samples = _curve_samples(animation_coefficients(anim), b_t, b_u)
    return np.stack(
        [nearest_rows(samples[f], f, tracks) for f in range(anim.num_frames)]
    )


def _consistency_core(
    q: np.ndarray,
    b_t: np.ndarray,
    b_u: np.ndarray,
    tracks: TrackSet,
    assignment_rows: np.ndarray,
    frame_order=None,
) -> tuple[float, np.ndarray]:
    num_frames = b_t.shape[0]
    n_p = b_u.shape[0]
    samples = _curve_samples(q, b_t, b_u)
    scale = 1.0 / (n_p * num_frames)
    value = 0.0
    point_grad = np.zeros_like(samples)
    order = range(num_frames) if frame_order is None else frame_order
    for i in order:
        anchors = np.moveaxis(tracks.coords[assignment_rows[i]], 2, 0)
        offsets = samples - anchors  # stroke point minus its frame-i anchor, per frame
        residuals = offsets[i][None] - offsets
        value += scale * float(np.sum(residuals * residuals))
        point_grad[i] += (2.0 * scale) * residuals.sum(axis=0)
        point_grad -= (2.0 * scale) * residuals
    grad = np.einsum("fjkc,ka,fb->jabc", point_grad, b_u, b_t)
    return value, grad


def consistency_loss_grad(
    anim: SketchAnimation,
    tracks: TrackSet,
    n_p: int,
    assignments: np.ndarray | None = None,
    frame_order=None,
) -> tuple[float, np.ndarray]:
    """Temporal consistency loss and its exact gradient (frozen assignments).

    Every sampled stroke point must move, between any two frames, like its
    nearest tracked point does. `assignments` freezes the nearest-point choice
    (as the per-iteration optimizer does); when omitted it is computed here.
    """
    _validate_tracks(anim, tracks)
    if assignments is None:
        assignments = consistency_assignments(anim, tracks, n_p)
    q = animation_coefficients(anim)
    b_t, b_u = _stroke_bases(anim, n_p)
    return _consistency_core(q, b_t, b_u, tracks, assignments, frame_order)


def _attachment_core(
    q: np.ndarray, b_t: np.ndarray, b_mid: np.ndarray, targets: np.ndarray
) -> tuple[float, np.ndarray]:
    num_frames, num_strokes = b_t.shape[0], q.shape[0]
    mids = np.einsum("fb,a,jabc->fjc", b_t, b_mid, q)
    diff = mids - targets.transpose(1, 0, 2)
    scale = 1.0 / (num_frames * num_strokes)
    value = scale * float(np.sum(diff * diff))
    grad = np.einsum("fjc,a,fb->jabc", (2.0 * scale) * diff, b_mid, b_t)
    return value, grad


def _check_targets(anim: SketchAnimation, targets: np.ndarray) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.float64)
    expected = (anim.num_strokes, anim.num_frames, 2)
    if targets.shape != expected:
        raise ValidationError(f"targets must have shape {expected}, got {targets.shape}")
    return targets


def attachment_loss_grad(
    anim: SketchAnimation, targets: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean squared distance between stroke midpoints (u=0.5) and their targets.

    `targets` has shape (N_s, N_f, 2). This is the pluggable data term standing
    in the semantic-loss slot; its gradient is exact (the map is linear).
    """
    targets = _check_targets(anim, targets)
    q = animation_coefficients(anim)
    b_t, _ = _stroke_bases(anim, 2)
    b_mid = basis_row(BasisKind.BERNSTEIN, anim.strokes[0].curve_degree, 0.5).values
    return _attachment_core(q, b_t, b_mid, targets)


def total_loss(
    anim: SketchAnimation,
    tracks: TrackSet | None,
    targets: np.ndarray | None,
    weights: LossWeights,
    n_p: int,
    geometry_term=None,
    assignments: np.ndarray | None = None,
) -> tuple[LossBreakdown, np.ndarray]:
    """Weighted sum of the loss components; zero-weight components are skipped."""
    q = animation_coefficients(anim)
    grad = np.zeros_like(q)
    consistency = attachment = geometry = 0.0
    if weights.w_c > 0:
        if tracks is None:
            raise ValidationError("consistency weight is positive but no tracks given")
        consistency, g = consistency_loss_grad(anim, tracks, n_p, assignments)
        grad += weights.w_c * g
    if weights.w_s > 0:
        if targets is None:
            raise ValidationError("attachment weight is positive but no targets given")
        attachment, g = attachment_loss_grad(anim, targets)
        grad += weights.w_s * g
    if weights.w_g > 0 and geometry_term is not None:
        geometry, g = geometry_term(anim)
        grad += weights.w_g * g
    total = weights.w_s * attachment + weights.w_g * geometry + weights.w_c * consistency
    return (
        LossBreakdown(
            total=total, consistency=consistency, attachment=attachment, geometry=geometry
        ),
        grad,
    )


def optimize_animation(
    anim: SketchAnimation,
    tracks: TrackSet | None,
    targets: np.ndarray | None,
    weights: LossWeights,
    config: OptimConfig,
    geometry_term=None,
) -> tuple[SketchAnimation, LossBreakdown]:
    """Adaptive-moment gradient descent on all trajectory coefficients.

    Nearest-point assignments are recomputed once per iteration and frozen
    within each gradient evaluation. Deterministic given its inputs; raises
    DivergenceError (with the iteration) if the loss or gradient goes
    non-finite.
    """
    if weights.w_c > 0:
        if tracks is None:
            raise ValidationError("consistency weight is positive but no tracks given")
        _validate_tracks(anim, tracks)
    if weights.w_s > 0:
        if targets is None:
            raise ValidationError("attachment weight is positive but no targets given")
        targets = _check_targets(anim, targets)
    q = animation_coefficients(anim).copy()
    b_t, b_u = _stroke_bases(anim, config.n_p)
    b_mid = basis_row(BasisKind.BERNSTEIN, anim.strokes[0].curve_degree, 0.5).values

    moment1 = np.zeros_like(q)
    moment2 = np.zeros_like(q)
    beta1, beta2 = config.moment_decay_1, config.moment_decay_2
    history: list[tuple[int, float]] = []
    components: list[tuple[int, float, float, float]] = []

    def evaluate(q_now: np.ndarray) -> tuple[float, float, float, float, np.ndarray]:
        grad = np.zeros_like(q_now)
        consistency = attachment = geometry = 0.0
        if weights.w_c > 0:
            samples = _curve_samples(q_now, b_t, b_u)
            rows = np.stack(
                [nearest_rows(samples[f], f, tracks) for f in range(anim.num_frames)]
            )
            consistency, g = _consistency_core(q_now, b_t, b_u, tracks, rows)
            grad += weights.w_c * g
        if weights.w_s > 0:
            attachment, g = _attachment_core(q_now, b_t, b_mid, targets)
            grad += weights.w_s * g
        if weights.w_g > 0 and geometry_term is not None:
            geometry, g = geometry_term(replace_coefficients(anim, q_now))
            grad += weights.w_g * g
        total = (
            weights.w_s * attachment + weights.w_g * geometry + weights.w_c * consistency
        )
        return total, consistency, attachment, geometry, grad

    for it in range(1, config.iterations + 1):
        total, consistency, attachment, geometry, grad = evaluate(q)
        if not (np.isfinite(total) and np.all(np.isfinite(grad))):
            raise DivergenceError(
                f"non-finite loss or gradient at iteration {it}", iteration=it
            )
        if it == 1 or it % config.log_every == 0 or it == config.iterations:
            history.append((it, total))
            components.append((it, total, consistency, attachment))
        # A gradient at roundoff scale means converged; the scale-free moment
        # normalization would otherwise amplify numerical noise into drift.
        if np.abs(grad).max() <= 1e-12 * max(1.0, np.abs(q).max()):
            continue
        moment1 = beta1 * moment1 + (1.0 - beta1) * grad
        moment2 = beta2 * moment2 + (1.0 - beta2) * grad * grad
        corrected1 = moment1 / (1.0 - beta1**it)
        corrected2 = moment2 / (1.0 - beta2**it)
        q = q - config.step_size * corrected1 / (np.sqrt(corrected2) + config.epsilon)

    total, consistency, attachment, geometry, _ = evaluate(q)
    breakdown = LossBreakdown(
        total=total,
        consistency=consistency,
        attachment=attachment,
        geometry=geometry,
        history=tuple(history),
        component_history=tuple(components),
    )
    return replace_coefficients(anim, q), breakdown


def finite_difference_check(
    anim: SketchAnimation,
    tracks: TrackSet | None,
    targets: np.ndarray | None,
    weights: LossWeights,
    n_p: int,
    step: float = 1e-3,
) -> float:
    """Worst relative error between the analytic gradient and central differences.

    Assignments are frozen across all evaluations, which makes the objective
    exactly quadratic; central differences then carry no truncation error, so
    the default step is chosen large enough to keep cancellation noise small.
    Small instances check every coefficient coordinate; large ones check a
    deterministic random 5% subset. Coordinates where both gradients are
    numerically zero contribute 0.
    """
    if step <= 0:
        raise ValidationError(f"step must be positive, got {step}")
    q0 = animation_coefficients(anim)
    b_t, b_u = _stroke_bases(anim, n_p)
    b_mid = basis_row(BasisKind.BERNSTEIN, anim.strokes[0].curve_degree, 0.5).values
    rows = None
    if weights.w_c > 0:
        _validate_tracks(anim, tracks)
        samples = _curve_samples(q0, b_t, b_u)
        rows = np.stack(
            [nearest_rows(samples[f], f, tracks) for f in range(anim.num_frames)]
        )
    if weights.w_s > 0:
        targets = _check_targets(anim, targets)

    def value_at(q_now: np.ndarray) -> float:
        total = 0.0
        if weights.w_c > 0:
            v, _ = _consistency_core(q_now, b_t, b_u, tracks, rows)
            total += weights.w_c * v
        if weights.w_s > 0:
            v, _ = _attachment_core(q_now, b_t, b_mid, targets)
            total += weights.w_s * v
        return total

    grad = np.zeros_like(q0)
    if weights.w_c > 0:
        _, g = _consistency_core(q0, b_t, b_u, tracks, rows)
        grad += weights.w_c * g
    if weights.w_s > 0:
        _, g = _attachment_core(q0, b_t, b_mid, targets)
        grad += weights.w_s * g

    flat_grad = grad.reshape(-1)
    size = flat_grad.size
    if size <= 512:
        indices = np.arange(size)
    else:
        count = max(1, int(round(0.05 * size)))
        indices = np.sort(np.random.default_rng(0).choice(size, count, replace=False))

    worst = 0.0
    flat_q = q0.reshape(-1)
    for idx in indices:
        bumped = flat_q.copy()
        bumped[idx] += step
        f_plus = value_at(bumped.reshape(q0.shape))
        bumped[idx] -= 2.0 * step
        f_minus = value_at(bumped.reshape(q0.shape))
        fd = (f_plus - f_minus) / (2.0 * step)
        denom = max(abs(fd), abs(flat_grad[idx]))
        if denom < 1e-9:
            continue
        worst = max(worst, abs(fd - flat_grad[idx]) / denom)
    return worst

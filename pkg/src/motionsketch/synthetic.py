"""Synthetic track generators for benchmarks, demos, and tests.

The benchmark track mimics a dancer-like motion: per point, a sum of three
sinusoids with incommensurate frequencies (multiples of sqrt(2), sqrt(3),
sqrt(5), so the signal never repeats) plus uniform pixel noise. Amplitudes
are ~100 px by default.
"""

from __future__ import annotations

import numpy as np

from .tracking import TrackSet

_CYCLES = np.array([np.sqrt(2.0), 2.0 * np.sqrt(3.0), 3.0 * np.sqrt(5.0)])
_AMPLITUDE_SPLIT = np.array([0.6, 0.3, 0.1])


def make_benchmark_tracks(
    num_points: int,
    num_frames: int,
    seed: int = 0,
    canvas: tuple[int, int] = (640, 480),
    amplitude: float = 100.0,
    noise: float = 0.5,
) -> TrackSet:
    """Complex-motion tracks: three incommensurate sinusoids plus uniform noise."""
    rng = np.random.default_rng(seed)
    w, h = canvas
    t = np.linspace(0.0, 1.0, num_frames)
    margin = amplitude + 10.0
    centers = np.stack(
        [
            rng.uniform(margin, w - margin, num_points),
            rng.uniform(margin, h - margin, num_points),
        ],
        axis=1,
    )
    coords = np.empty((num_points, num_frames, 2))
    for k in range(num_points):
        pos = np.repeat(centers[k][None, :], num_frames, axis=0)
        for cycles, amp in zip(_CYCLES, _AMPLITUDE_SPLIT * amplitude):
            phase = rng.uniform(0.0, 2.0 * np.pi, size=2)
            omega = 2.0 * np.pi * cycles
            pos[:, 0] += amp * np.sin(omega * t + phase[0])
            pos[:, 1] += amp * np.cos(omega * t + phase[1])
        pos += rng.uniform(-noise, noise, size=pos.shape)
        coords[k] = pos
    return TrackSet(ids=np.arange(num_points), coords=coords)


def make_demo_tracks(
    num_points: int = 16,
    num_frames: int = 50,
    seed: int = 7,
    canvas: tuple[int, int] = (256, 256),
) -> TrackSet:
    """Gentle swirling motion for the end-to-end demo: a drifting, breathing ring."""
    rng = np.random.default_rng(seed)
    w, h = canvas
    t = np.linspace(0.0, 1.0, num_frames)
    center = np.array([w / 2.0, h / 2.0])
    drift = np.stack([30.0 * np.sin(2.0 * np.pi * t), 20.0 * np.sin(4.0 * np.pi * t)], axis=1)
    coords = np.empty((num_points, num_frames, 2))
    for k in range(num_points):
        angle0 = 2.0 * np.pi * k / num_points + rng.uniform(-0.1, 0.1)
        radius = (min(w, h) / 4.0) * (1.0 + 0.25 * np.sin(2.0 * np.pi * t + angle0))
        angle = angle0 + 0.8 * np.sin(2.0 * np.pi * t)
        ring = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        coords[k] = center + drift + ring
    return TrackSet(ids=np.arange(num_points), coords=coords)

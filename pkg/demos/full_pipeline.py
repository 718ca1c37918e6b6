"""End-to-end: tracks -> motion heatmap -> seeded strokes -> optimization -> SVG.

Writes the initial and optimized animations side by side into demos/output/
so the effect of the temporal-consistency optimization is visible in any
SVG-capable viewer (the files self-animate).
"""

import os

import numpy as np

from motionsketch import (
    InitConfig,
    LossWeights,
    OptimConfig,
    build_motion_heatmap,
    compose_density_map,
    derive_attachment_targets,
    export_animated_svg,
    init_animation,
    make_demo_tracks,
    optimize_animation,
    resample_framerate,
    save_model,
    total_loss,
    uniform_map,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

W = H = 256
tracks = make_demo_tracks(num_points=16, num_frames=50)
print(f"tracks: {tracks.num_points} points x {tracks.num_frames} frames")

heatmap = build_motion_heatmap(tracks, W, H)
print(f"motion heatmap: peak {heatmap.values.max():.2f}, "
      f"mean {heatmap.values.mean():.3f}")

density = compose_density_map(uniform_map(W, H), uniform_map(W, H), heatmap, beta=0.5)
config = InitConfig(num_strokes=16, rng_seed=0)
anim = init_animation(config, density, tracks, widths=np.full(50, 2.5))
save_model(anim, os.path.join(OUT, "initial.json"))
export_animated_svg(
    anim, resample_framerate(anim, 12, 12), os.path.join(OUT, "initial.svg")
)

targets = derive_attachment_targets(anim, tracks)
weights = LossWeights(w_s=1.0, w_c=0.5)
before, _ = total_loss(anim, tracks, targets, weights, 8)
optimized, breakdown = optimize_animation(
    anim, tracks, targets, weights,
    OptimConfig(iterations=300, step_size=0.2, log_every=50),
)
print(f"loss: {before.total:.4e} -> {breakdown.total:.4e}")
for iteration, value in breakdown.history:
    print(f"  iter {iteration:4d}: {value:.4e}")

save_model(optimized, os.path.join(OUT, "optimized.json"))
export_animated_svg(
    optimized, resample_framerate(optimized, 12, 12), os.path.join(OUT, "optimized.svg")
)
print(f"wrote {OUT}/initial.svg and {OUT}/optimized.svg")

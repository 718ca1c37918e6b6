"""Regenerate the bundled demo track file (data/demo_tracks.json).

Deterministic; the committed file must match this script's output.
"""

import os

from motionsketch import make_demo_tracks, save_tracks

path = os.path.join(os.path.dirname(__file__), "..", "data", "demo_tracks.json")
tracks = make_demo_tracks(num_points=16, num_frames=50, seed=7, canvas=(256, 256))
save_tracks(tracks, os.path.abspath(path))
print(f"wrote {os.path.abspath(path)}: {tracks.num_points} points x "
      f"{tracks.num_frames} frames")

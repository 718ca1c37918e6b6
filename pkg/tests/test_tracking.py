"""Track ingestion, motion weights, heatmap, nearest queries, motion transfer."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from motionsketch import (
    ParseError,
    TrackSet,
    ValidationError,
    build_motion_heatmap,
    load_tracks,
    motion_weight,
    nearest_sample,
    save_tracks,
    transfer_point,
)


def simple_tracks():
    coords = np.array(
        [
            [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            [[10.0, 10.0], [10.0, 10.0], [10.0, 10.0]],
        ]
    )
    return TrackSet(ids=np.array([3, 7]), coords=coords)


class TestLoading:
    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "tracks.json"
        save_tracks(simple_tracks(), str(path))
        loaded = load_tracks(str(path))
        assert loaded.num_frames == 3 and loaded.num_points == 2
        assert_allclose(loaded.coords, simple_tracks().coords)

    def test_json_two_points_three_frames(self, tmp_path):
        doc = {
            "num_frames": 3,
            "points": [
                {"id": 1, "xy": [[0, 0], [1, 1], [2, 2]]},
                {"id": 2, "xy": [[5, 5], [5, 5], [5, 5]]},
            ],
        }
        path = tmp_path / "t.json"
        path.write_text(json.dumps(doc))
        tracks = load_tracks(str(path))
        assert tracks.num_frames == 3

    def test_json_ragged_names_point(self, tmp_path):
        doc = {
            "num_frames": 3,
            "points": [
                {"id": 9, "xy": [[0, 0], [1, 1]]},
            ],
        }
        path = tmp_path / "t.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="9"):
            load_tracks(str(path))

    def test_json_visibility_ignored(self, tmp_path):
        doc = {
            "num_frames": 2,
            "points": [{"id": 1, "xy": [[0, 0], [1, 1]], "visible": [True, False]}],
        }
        path = tmp_path / "t.json"
        path.write_text(json.dumps(doc))
        assert load_tracks(str(path)).num_points == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text("")
        with pytest.raises(ValidationError, match="no points"):
            load_tracks(str(path))

    def test_malformed_json_parse_error(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text('{"num_frames": 3, ')
        with pytest.raises(ParseError):
            load_tracks(str(path))

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "t.csv"
        lines = ["frame,point_id,x,y"]
        for f in range(3):
            for pid, (x, y) in ((3, (f, 0.0)), (7, (10.0, 10.0))):
                lines.append(f"{f},{pid},{x},{y}")
        path.write_text("\n".join(lines) + "\n")
        tracks = load_tracks(str(path))
        assert tracks.num_frames == 3
        assert list(tracks.ids) == [3, 7]

    def test_csv_row_count_mismatch(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("frame,point_id,x,y\n0,1,0,0\n0,2,1,1\n1,1,0,0\n")
        with pytest.raises(ValidationError, match="divisible"):
            load_tracks(str(path))

    def test_csv_empty(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("frame,point_id,x,y\n")
        with pytest.raises(ValidationError, match="no points"):
            load_tracks(str(path))

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError):
            TrackSet(ids=np.array([1, 1]), coords=np.zeros((2, 3, 2)))


class TestMotionWeight:
    def test_static_point_zero(self):
        assert motion_weight(simple_tracks(), 7) == 0.0

    def test_one_pixel_per_frame(self):
        coords = np.zeros((1, 5, 2))
        coords[0, :, 0] = np.arange(5)
        tracks = TrackSet(ids=np.array([0]), coords=coords)
        assert motion_weight(tracks, 0) == pytest.approx(2.0)

    def test_single_jump(self):
        coords = np.zeros((1, 4, 2))
        coords[0, 1:, 0] = 9.0
        tracks = TrackSet(ids=np.array([0]), coords=coords)
        assert motion_weight(tracks, 0) == pytest.approx(3.0)

    def test_unknown_id(self):
        with pytest.raises(LookupError):
            motion_weight(simple_tracks(), 99)


class TestHeatmap:
    def test_single_mover_peaks_at_nearest_pixel(self):
        coords = np.array([[[3.2, 4.7], [8.2, 4.7]]])
        tracks = TrackSet(ids=np.array([5]), coords=coords)
        heatmap = build_motion_heatmap(tracks, 10, 10, bandwidth=1.5)
        peak = np.unravel_index(np.argmax(heatmap.values), heatmap.values.shape)
        assert peak == (4, 3)
        assert heatmap.values[peak] == 1.0

    def test_all_static_all_zero(self):
        coords = np.repeat(np.array([[[1.0, 1.0]], [[5.0, 5.0]]]), 4, axis=1)
        static = TrackSet(ids=np.array([0, 1]), coords=coords)
        assert not build_motion_heatmap(static, 8, 8).values.any()

    def test_two_points_near_binary(self):
        coords = np.array(
            [[[2.0, 4.0], [2.0, 4.0]], [[12.0, 4.0], [17.0, 4.0]]]
        )
        tracks = TrackSet(ids=np.array([0, 1]), coords=coords)
        heatmap = build_motion_heatmap(tracks, 16, 8, bandwidth=0.8)
        # Kernel oracle at both sites: mover's site ~ V, static site ~ 0.
        assert heatmap.values[4, 12] > 0.99
        assert heatmap.values[4, 2] < 0.01

    def test_range_invariant(self, rng):
        coords = rng.uniform(0, 32, (15, 6, 2))
        tracks = TrackSet(ids=np.arange(15), coords=coords)
        heatmap = build_motion_heatmap(tracks, 32, 24)
        assert heatmap.values.min() == 0.0
        assert heatmap.values.max() == 1.0

    def test_bad_bandwidth(self):
        with pytest.raises(ValidationError):
            build_motion_heatmap(simple_tracks(), 8, 8, bandwidth=0.0)


class TestNearestSample:
    def test_exact_position(self):
        tracks = simple_tracks()
        assert nearest_sample(np.array([10.0, 10.0]), 1, tracks) == 7

    def test_tie_breaks_to_lowest_id(self):
        tracks = simple_tracks()
        # frame 0: point 3 at (0,0), point 7 at (10,10); (5,5) is equidistant
        assert nearest_sample(np.array([5.0, 5.0]), 0, tracks) == 3

    def test_brute_force_oracle(self, rng):
        coords = rng.uniform(0, 100, (300, 4, 2))
        tracks = TrackSet(ids=np.arange(300), coords=coords)
        for _ in range(200):
            p = rng.uniform(0, 100, 2)
            frame = int(rng.integers(0, 4))
            best, best_d = None, np.inf
            for k in range(300):
                d = float(np.sum((coords[k, frame] - p) ** 2))
                if d < best_d:
                    best, best_d = k, d
            assert nearest_sample(p, frame, tracks) == best

    def test_kdtree_path_matches_scan(self, rng):
        # Enough points to engage the KD-tree inside batched queries.
        from motionsketch.tracking import nearest_rows

        coords = rng.uniform(0, 50, (600, 2, 2))
        tracks = TrackSet(ids=np.arange(600), coords=coords)
        queries = rng.uniform(0, 50, (64, 2))
        rows = nearest_rows(queries, 1, tracks)
        d2 = np.sum((queries[:, None, :] - coords[None, :, 1, :]) ** 2, axis=2)
        assert np.array_equal(rows, np.argmin(d2, axis=1))

    def test_frame_out_of_range(self):
        with pytest.raises(ValidationError):
            nearest_sample(np.array([0.0, 0.0]), 5, simple_tracks())


class TestTransferPoint:
    def test_identity_at_same_frame(self, rng):
        tracks = simple_tracks()
        for _ in range(20):
            p = rng.uniform(-5, 15, 2)
            frame = int(rng.integers(0, 3))
            assert_allclose(transfer_point(p, frame, frame, tracks), p)

    def test_rigid_translation(self):
        coords = np.array([[[1.0, 2.0], [4.0, 6.0]]])
        tracks = TrackSet(ids=np.array([0]), coords=coords)
        p = np.array([10.0, 10.0])
        assert_allclose(transfer_point(p, 0, 1, tracks), p + np.array([3.0, 4.0]))

    def test_two_point_hand_evaluation(self):
        tracks = simple_tracks()
        # p=(1,1) in frame 0 is nearer to point 3 at (0,0) than 7 at (10,10).
        # T = p - (0,0) + coords(3, frame 2) = (1,1) + (2,0)
        assert_allclose(transfer_point(np.array([1.0, 1.0]), 0, 2, tracks), [3.0, 1.0])

    def test_offset_preservation(self, rng):
        coords = rng.uniform(0, 100, (5, 4, 2))
        tracks = TrackSet(ids=np.arange(5), coords=coords)
        for _ in range(50):
            anchor = coords[int(rng.integers(0, 5)), 1]
            p = anchor + rng.uniform(-0.5, 0.5, 2)
            q = anchor + rng.uniform(-0.5, 0.5, 2)
            if nearest_sample(p, 1, tracks) != nearest_sample(q, 1, tracks):
                continue
            dp = transfer_point(p, 1, 3, tracks) - transfer_point(q, 1, 3, tracks)
            assert_allclose(dp, p - q, atol=1e-12)

"""Density maps, seed sampling, target assignment, animation init, widths."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from motionsketch import (
    DegenerateInputError,
    InitConfig,
    MaskAreas,
    TrackSet,
    ValidationError,
    animation_coefficients,
    assign_track_targets,
    compose_density_map,
    consistency_loss_grad,
    eval_curve_point,
    init_animation,
    load_mask_areas,
    load_pgm,
    replace_coefficients,
    sample_stroke_seeds,
    save_pgm,
    stroke_width_schedule,
    uniform_map,
)


def circle_tracks(num_points=8, num_frames=6, center=(32.0, 32.0), radius=12.0):
    t = np.linspace(0.0, 1.0, num_frames)
    coords = np.empty((num_points, num_frames, 2))
    for k in range(num_points):
        angle = 2 * np.pi * k / num_points + 0.5 * np.sin(2 * np.pi * t)
        coords[k, :, 0] = center[0] + radius * np.cos(angle)
        coords[k, :, 1] = center[1] + radius * np.sin(angle)
    return TrackSet(ids=np.arange(num_points), coords=coords)


class TestComposeDensityMap:
    def test_beta_zero_ignores_motion(self, rng):
        xdog = rng.random((6, 8))
        attention = rng.random((6, 8))
        motion = rng.random((6, 8))
        got = compose_density_map(xdog, attention, motion, 0.0)
        expected = xdog * attention
        assert_allclose(got.probabilities, expected / expected.sum())

    def test_beta_one_ignores_attention(self, rng):
        xdog = rng.random((6, 8))
        attention = rng.random((6, 8))
        motion = rng.random((6, 8))
        got = compose_density_map(xdog, attention, motion, 1.0)
        expected = xdog * motion
        assert_allclose(got.probabilities, expected / expected.sum())

    def test_constant_maps_uniform(self):
        ones = np.ones((4, 4))
        got = compose_density_map(ones, ones, np.zeros((4, 4)), 0.5)
        assert_allclose(got.probabilities, np.full((4, 4), 1 / 16))
        assert_allclose(got.unnormalized, np.full((4, 4), 0.5))

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            compose_density_map(np.ones((4, 4)), np.ones((4, 5)), np.ones((4, 4)), 0.5)

    def test_all_zero_degenerate(self):
        zeros = np.zeros((4, 4))
        with pytest.raises(DegenerateInputError):
            compose_density_map(zeros, np.ones((4, 4)), np.ones((4, 4)), 0.5)

    def test_normalization_invariant(self, rng):
        got = compose_density_map(
            rng.random((5, 7)), rng.random((5, 7)), rng.random((5, 7)), 0.3
        )
        assert abs(got.probabilities.sum() - 1.0) < 1e-9

    def test_motion_influence_monotone_in_beta(self, rng):
        # At the pixel where motion is maximal and attention minimal, raising
        # beta never lowers the pre-normalization density.
        xdog = rng.uniform(0.2, 1.0, (6, 6))
        attention = rng.uniform(0.0, 1.0, (6, 6))
        motion = rng.uniform(0.0, 1.0, (6, 6))
        pixel = np.unravel_index(np.argmax(motion - attention), motion.shape)
        previous = -np.inf
        for beta in np.linspace(0.0, 1.0, 11):
            value = compose_density_map(xdog, attention, motion, beta).unnormalized[pixel]
            assert value >= previous - 1e-12
            previous = value


class TestSampleSeeds:
    def test_point_mass_stays_in_pixel(self):
        probs = np.zeros((5, 5))
        probs[2, 3] = 1.0
        density = compose_density_map(probs, np.ones((5, 5)), np.ones((5, 5)), 0.0)
        seeds = sample_stroke_seeds(density, 50, seed=0)
        assert np.all((seeds[:, 0] >= 3) & (seeds[:, 0] < 4))
        assert np.all((seeds[:, 1] >= 2) & (seeds[:, 1] < 3))

    def test_uniform_quadrant_counts(self):
        ones = np.ones((20, 20))
        density = compose_density_map(ones, ones, ones, 0.5)
        seeds = sample_stroke_seeds(density, 10_000, seed=42)
        left = seeds[:, 0] < 10
        top = seeds[:, 1] < 10
        sigma = np.sqrt(10_000 * 0.25 * 0.75)
        for quadrant in (
            left & top, left & ~top, ~left & top, ~left & ~top,
        ):
            assert abs(quadrant.sum() - 2500) < 4 * sigma

    def test_same_seed_identical(self, rng):
        density = compose_density_map(
            rng.random((8, 8)), np.ones((8, 8)), np.ones((8, 8)), 0.5
        )
        a = sample_stroke_seeds(density, 17, seed=5)
        b = sample_stroke_seeds(density, 17, seed=5)
        assert np.array_equal(a, b)


class TestAssignTargets:
    def test_seed_on_track_is_verbatim(self):
        tracks = circle_tracks()
        seed = tracks.coords[3, 0]
        targets = assign_track_targets(seed[None, :], tracks)
        assert_allclose(targets[0], tracks.coords[3])

    def test_static_track_constant_target(self):
        coords = np.repeat(np.array([[[7.0, 9.0]]]), 5, axis=1)
        tracks = TrackSet(ids=np.array([0]), coords=coords)
        seed = np.array([[3.0, 4.0]])
        targets = assign_track_targets(seed, tracks)
        assert_allclose(targets[0], np.repeat(seed, 5, axis=0))

    def test_parallel_targets_near_same_track(self):
        tracks = circle_tracks()
        anchor = tracks.coords[0, 0]
        seeds = np.stack([anchor + (0.1, 0.0), anchor + (0.3, 0.1)])
        targets = assign_track_targets(seeds, tracks)
        deltas = targets[0] - targets[1]
        assert_allclose(deltas, np.repeat(deltas[:1], tracks.num_frames, axis=0), atol=1e-12)


class TestWidthSchedule:
    def test_formula_endpoints(self):
        mask = MaskAreas(areas=np.array([64 * 48, 0.0, 64 * 48 / 4]), canvas=(64, 48))
        widths = stroke_width_schedule(mask, 3.0)
        assert_allclose(widths, [3.0, 0.0, 1.5])

    def test_monotone_in_area(self, rng):
        areas = np.sort(rng.uniform(0, 64 * 48, 10))
        widths = stroke_width_schedule(MaskAreas(areas=areas, canvas=(64, 48)), 2.5)
        assert np.all(np.diff(widths) >= 0)

    def test_rejects_oversized_area(self):
        with pytest.raises(ValidationError):
            MaskAreas(areas=np.array([65 * 48]), canvas=(64, 48))


class TestInitAnimation:
    def density(self, w=64, h=64):
        return compose_density_map(
            uniform_map(w, h), uniform_map(w, h), uniform_map(w, h), 0.5
        )

    def test_static_tracks_constant_trajectories(self):
        coords = np.repeat(np.array([[[30.0, 30.0]]]), 6, axis=1)
        tracks = TrackSet(ids=np.array([0]), coords=coords)
        config = InitConfig(num_strokes=2, trajectory_degree=2, rng_seed=1)
        anim = init_animation(config, self.density(), tracks, np.ones(6))
        for stroke in anim.strokes:
            for traj in stroke.control_trajectories:
                spread = np.abs(traj.coeffs - traj.coeffs.mean(axis=0)).max()
                assert spread <= 1e-3 * max(1.0, np.abs(traj.coeffs).max())

    def test_frame_zero_span_matches_config(self):
        tracks = circle_tracks()
        config = InitConfig(
            num_strokes=1, trajectory_degree=3, rng_seed=3, initial_stroke_span=20.0
        )
        anim = init_animation(config, self.density(), tracks, np.ones(6))
        stroke = anim.strokes[0]
        first = eval_curve_point(stroke, 0.0, 0.0)
        last = eval_curve_point(stroke, 1.0, 0.0)
        # ridge shrinkage and perpendicular jitter allow a small deviation
        assert np.linalg.norm(last - first) == pytest.approx(20.0, rel=0.15)

    def test_seeds_follow_peaked_density(self):
        w = h = 40
        xdog = np.zeros((h, w))
        xdog[16:24, 16:24] = 1.0  # top-decile region: the lit square
        density = compose_density_map(xdog, np.ones((h, w)), np.ones((h, w)), 0.5)
        tracks = circle_tracks(center=(20.0, 20.0))
        config = InitConfig(num_strokes=16, trajectory_degree=2, rng_seed=0)
        anim = init_animation(config, density, tracks, np.ones(6))
        seeds = sample_stroke_seeds(density, 16, seed=0)
        inside = (
            (seeds[:, 0] >= 16) & (seeds[:, 0] < 24)
            & (seeds[:, 1] >= 16) & (seeds[:, 1] < 24)
        )
        assert inside.sum() >= 12

    def test_determinism(self):
        tracks = circle_tracks()
        config = InitConfig(num_strokes=4, trajectory_degree=3, rng_seed=11)
        a = init_animation(config, self.density(), tracks, np.ones(6))
        b = init_animation(config, self.density(), tracks, np.ones(6))
        assert np.array_equal(animation_coefficients(a), animation_coefficients(b))

    def test_initialized_beats_random_consistency(self, rng):
        tracks = circle_tracks()
        config = InitConfig(num_strokes=3, trajectory_degree=3, rng_seed=2)
        anim = init_animation(config, self.density(), tracks, np.ones(6))
        init_loss, _ = consistency_loss_grad(anim, tracks, 4)
        assert np.isfinite(init_loss)
        shape = animation_coefficients(anim).shape
        for _ in range(20):
            random_anim = replace_coefficients(anim, rng.uniform(0, 64, shape))
            random_loss, _ = consistency_loss_grad(random_anim, tracks, 4)
            assert init_loss <= random_loss


class TestFileIngestion:
    def test_pgm_binary_round_trip(self, tmp_path, rng):
        values = rng.random((6, 9))
        path = tmp_path / "map.pgm"
        save_pgm(str(path), values)
        loaded = load_pgm(str(path))
        assert loaded.shape == (6, 9)
        assert np.abs(loaded - values).max() <= 0.5 / 255 + 1e-12

    def test_pgm_16bit_round_trip(self, tmp_path, rng):
        values = rng.random((4, 5))
        path = tmp_path / "map16.pgm"
        save_pgm(str(path), values, maxval=65535)
        loaded = load_pgm(str(path))
        assert np.abs(loaded - values).max() <= 0.5 / 65535 + 1e-12

    def test_pgm_ascii(self, tmp_path):
        path = tmp_path / "map.pgm"
        path.write_text("P2\n# comment\n3 2\n255\n0 128 255\n255 128 0\n")
        loaded = load_pgm(str(path))
        assert loaded.shape == (2, 3)
        assert loaded[0, 2] == 1.0 and loaded[1, 2] == 0.0

    def test_mask_areas_csv(self, tmp_path):
        path = tmp_path / "areas.csv"
        path.write_text("frame,area_pixels\n0,100\n1,400\n2,900\n")
        mask = load_mask_areas(str(path), (64, 64))
        assert_allclose(mask.areas, [100, 400, 900])

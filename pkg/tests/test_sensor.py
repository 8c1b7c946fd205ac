"""Range sensor tests against analytic ray geometry."""

import math

import numpy as np
import pytest

from navfuse.sensor import TofModel, ray_angles, sense_tof
from navfuse.vision import LanePath
from navfuse.world import DronePose, Rect, Section, World

QUIET = TofModel(noise_sigma_mm=0.0)


def bare_world(walls, obstacles=()):
    lane = LanePath([(0, 0), (1, 0)])
    return World(walls, list(obstacles), lane, DronePose(0, 0, 0),
                 Rect(99, 99, 0.1, 0.1), [(Section.STRAIGHT, Rect(0, 0, 100, 100))])


class TestRayAngles:
    def test_column_zero_looks_left(self):
        angles = ray_angles(0.0, QUIET)
        assert angles[0] > 0 > angles[7]
        assert angles[0] == pytest.approx(math.radians(65 / 2 - 65 / 16))
        assert np.allclose(np.diff(angles), -math.radians(65 / 8))
        assert np.allclose(angles, -angles[::-1])  # symmetric about heading


class TestSenseTof:
    def test_empty_world_all_invalid_max_range(self):
        world = bare_world([])
        frame = sense_tof(world, DronePose(0, 0, 0), QUIET, np.random.default_rng(0))
        assert np.all(frame.cells == 4000)
        assert not frame.validity.any()

    def test_far_wall_beyond_range_clamps_invalid(self):
        world = bare_world([(10.0, -5.0, 10.0, 5.0)])
        frame = sense_tof(world, DronePose(0, 0, 0), QUIET, np.random.default_rng(0))
        assert np.all(frame.cells == 4000)
        assert not frame.validity.any()

    def test_perpendicular_wall_matches_analytic_distances(self):
        world = bare_world([(1.0, -50.0, 1.0, 50.0)])
        pose = DronePose(0.0, 0.0, 0.0)
        frame = sense_tof(world, pose, QUIET, np.random.default_rng(0))
        angles = ray_angles(0.0, QUIET)
        for k in range(8):
            expected = 1000.0 / math.cos(angles[k])
            assert abs(frame.cells[3, k] - expected) <= 1.0
        assert frame.validity.all()

    def test_rows_replicate_the_azimuth_scan(self):
        world = bare_world([(1.0, -50.0, 1.0, 50.0)])
        frame = sense_tof(world, DronePose(0, 0, 0.2), QUIET, np.random.default_rng(0))
        assert np.all(frame.cells == frame.cells[0:1, :])
        assert np.all(frame.validity == frame.validity[0:1, :])

    def test_near_wall_clamps_to_min_range_valid(self):
        world = bare_world([(0.1, -5.0, 0.1, 5.0)])
        frame = sense_tof(world, DronePose(0, 0, 0), QUIET, np.random.default_rng(0))
        assert np.all(frame.cells[:, 3:5] == 200)
        assert frame.validity.all()

    def test_obstacle_edges_are_visible(self):
        world = bare_world([], obstacles=[Rect(2.0, 0.0, 0.15, 0.5)])
        frame = sense_tof(world, DronePose(0, 0, 0), QUIET, np.random.default_rng(0))
        assert frame.validity[0, 3] and frame.validity[0, 4]
        assert abs(frame.cells[0, 3] - 1850.0 / math.cos(math.radians(65 / 16))) <= 1.0

    def test_same_seed_same_sequence(self):
        world = bare_world([(1.5, -50.0, 1.5, 50.0)])
        model = TofModel(noise_sigma_mm=20.0)
        rng_a = np.random.default_rng(9)
        rng_b = np.random.default_rng(9)
        a = [sense_tof(world, DronePose(0, 0, 0), model, rng_a, t) for t in range(5)]
        b = [sense_tof(world, DronePose(0, 0, 0), model, rng_b, t) for t in range(5)]
        for fa, fb in zip(a, b):
            assert np.array_equal(fa.cells, fb.cells)
        assert not np.array_equal(a[0].cells, a[1].cells)  # noise varies per frame

    def test_noisy_cells_stay_inside_sensor_range(self):
        world = bare_world([(0.25, -50.0, 0.25, 50.0), (3.9, -50.0, 3.9, 50.0)])
        model = TofModel(noise_sigma_mm=500.0)
        rng = np.random.default_rng(1)
        for t in range(50):
            frame = sense_tof(world, DronePose(0.0, 0.0, 0.0), model, rng, t)
            assert frame.cells.min() >= 200
            assert frame.cells.max() <= 4000

    def test_validity_is_noise_free(self):
        world = bare_world([(3.99, -50.0, 3.99, 50.0)])
        model = TofModel(noise_sigma_mm=80.0)
        rng = np.random.default_rng(2)
        masks = [sense_tof(world, DronePose(0, 0, 0), model, rng, t).validity
                 for t in range(20)]
        for m in masks[1:]:
            assert np.array_equal(m, masks[0])

    def test_mirror_symmetry_on_random_worlds(self):
        rng = np.random.default_rng(123)
        for _ in range(100):
            n = rng.integers(2, 8)
            segs = rng.uniform(-4.0, 4.0, size=(n, 4))
            world = bare_world([tuple(s) for s in segs])
            mirrored = bare_world([(s[0], -s[1], s[2], -s[3]) for s in segs])
            pose = DronePose(rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-math.pi, math.pi))
            flipped = DronePose(pose.x, -pose.y, -pose.heading)
            fa = sense_tof(world, pose, QUIET, np.random.default_rng(0))
            fb = sense_tof(mirrored, flipped, QUIET, np.random.default_rng(0))
            assert np.array_equal(fb.cells, fa.cells[:, ::-1])
            assert np.array_equal(fb.validity, fa.validity[:, ::-1])

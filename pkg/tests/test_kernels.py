"""Backend twins must agree; ray casting checked against hand geometry."""

import os
import subprocess
import sys

import numpy as np
import pytest

from navfuse import _kernels
from navfuse.depth import gaussian_kernel

KERNEL = gaussian_kernel(1.0)


def random_segments(rng, n=12):
    return rng.uniform(-5.0, 5.0, size=(n, 4))


class TestBackendTwins:
    @pytest.mark.skipif(_kernels.BACKEND != "numba", reason="numba backend inactive")
    def test_smooth_twins_agree(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            cells = rng.uniform(200.0, 4000.0, size=(8, 8))
            a, mac_a = _kernels.smooth8x8_numba(cells, KERNEL)
            b, mac_b = _kernels.smooth8x8_numpy(cells, KERNEL)
            assert mac_a == mac_b == 1600
            assert np.allclose(a, b, rtol=1e-12, atol=1e-9)

    @pytest.mark.skipif(_kernels.BACKEND != "numba", reason="numba backend inactive")
    def test_ray_twins_agree(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            segs = random_segments(rng)
            angles = rng.uniform(-np.pi, np.pi, size=8)
            a = _kernels.cast_rays_numba(0.3, -0.2, angles, segs)
            b = _kernels.cast_rays_numpy(0.3, -0.2, angles, segs)
            assert np.allclose(a, b, rtol=1e-12, equal_nan=True)

    @pytest.mark.skipif(_kernels.BACKEND != "numba", reason="numba backend inactive")
    def test_distance_twins_agree(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            segs = random_segments(rng)
            px, py = rng.uniform(-5, 5, size=2)
            a = _kernels.point_segment_distances_numba(px, py, segs)
            b = _kernels.point_segment_distances_numpy(px, py, segs)
            assert np.allclose(a, b, rtol=1e-12)

    @pytest.mark.skipif(_kernels.BACKEND != "numba", reason="numba backend inactive")
    def test_rect_twins_agree(self):
        rng = np.random.default_rng(3)
        rects = np.column_stack([rng.uniform(-2, 2, 5), rng.uniform(-2, 2, 5),
                                 rng.uniform(0.1, 1, 5), rng.uniform(0.1, 1, 5),
                                 np.cos(rng.uniform(0, np.pi, 5)),
                                 np.sin(rng.uniform(0, np.pi, 5))])
        for _ in range(200):
            px, py = rng.uniform(-3, 3, size=2)
            assert (_kernels.in_any_rect_numba(px, py, rects)
                    == _kernels.in_any_rect_numpy(px, py, rects))


class TestRayCasting:
    def test_perpendicular_segment(self):
        segs = np.array([[2.0, -1.0, 2.0, 1.0]])
        d = _kernels.cast_rays(0.0, 0.0, np.array([0.0]), segs)
        assert d[0] == pytest.approx(2.0, abs=1e-12)

    def test_miss_returns_inf(self):
        segs = np.array([[2.0, 1.0, 2.0, 3.0]])  # off to the side
        d = _kernels.cast_rays(0.0, 0.0, np.array([0.0]), segs)
        assert np.isinf(d[0])

    def test_behind_returns_inf(self):
        segs = np.array([[-2.0, -1.0, -2.0, 1.0]])
        d = _kernels.cast_rays(0.0, 0.0, np.array([0.0]), segs)
        assert np.isinf(d[0])

    def test_nearest_of_two(self):
        segs = np.array([[3.0, -1.0, 3.0, 1.0], [1.5, -1.0, 1.5, 1.0]])
        d = _kernels.cast_rays(0.0, 0.0, np.array([0.0]), segs)
        assert d[0] == pytest.approx(1.5)

    def test_oblique_hit(self):
        # wall x=1 hit at 30 degrees: distance 1/cos(30)
        segs = np.array([[1.0, -5.0, 1.0, 5.0]])
        ang = np.deg2rad(30.0)
        d = _kernels.cast_rays(0.0, 0.0, np.array([ang]), segs)
        assert d[0] == pytest.approx(1.0 / np.cos(ang), rel=1e-12)

    def test_empty_world(self):
        d = _kernels.cast_rays_numpy(0.0, 0.0, np.zeros(3), np.zeros((0, 4)))
        assert np.all(np.isinf(d))


class TestPointDistances:
    def test_projection_inside_segment(self):
        segs = np.array([[0.0, 0.0, 4.0, 0.0]])
        assert _kernels.point_segment_distances(2.0, 3.0, segs)[0] == pytest.approx(3.0)

    def test_clamped_to_endpoint(self):
        segs = np.array([[0.0, 0.0, 4.0, 0.0]])
        assert _kernels.point_segment_distances(-3.0, 4.0, segs)[0] == pytest.approx(5.0)

    def test_degenerate_segment(self):
        segs = np.array([[1.0, 1.0, 1.0, 1.0]])
        assert _kernels.point_segment_distances(4.0, 5.0, segs)[0] == pytest.approx(5.0)


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, NAVFUSE_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from navfuse import _kernels; print(_kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_warmup_runs():
    _kernels.warmup()

"""Hot numeric kernels, in numba-jitted and pure-numpy flavors.

Everything the 15 Hz control loop touches per tick lives here: the 5x5
smoothing convolution over the 8x8 depth grid, batched ray/segment
intersection for the range sensor, and point/segment + point/rectangle
distance queries for collision checking.

The jitted versions are used when numba imports cleanly, unless the
environment variable NAVFUSE_NO_NUMBA is set to 1/true/yes, which forces
the pure-numpy twins (handy for debugging and for the kernel benchmark).
Both flavors are kept importable so they can be compared directly.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

GRID = 8
KSIZE = 5
PAD = KSIZE // 2


def _no_numba_requested() -> bool:
    return os.environ.get("NAVFUSE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}


# ---------------------------------------------------------------------------
# pure-numpy kernels
# ---------------------------------------------------------------------------

def smooth8x8_numpy(cells: np.ndarray, kernel: np.ndarray):
    """Zero-padded 5x5 convolution of an 8x8 grid.

    Returns (smoothed 8x8 float64 array, multiply-accumulate count).
    """
    padded = np.zeros((GRID + 2 * PAD, GRID + 2 * PAD), dtype=np.float64)
    padded[PAD:PAD + GRID, PAD:PAD + GRID] = cells
    windows = sliding_window_view(padded, (KSIZE, KSIZE))
    out = np.einsum("rcij,ij->rc", windows, kernel)
    return out, GRID * GRID * KSIZE * KSIZE


def cast_rays_numpy(ox: float, oy: float, angles: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Distance from (ox, oy) along each angle to the nearest segment.

    segments is an (M, 4) array of x1,y1,x2,y2 rows. Rays that hit nothing
    get np.inf.
    """
    if segments.shape[0] == 0:
        return np.full(angles.shape[0], np.inf)
    dx = np.cos(angles)[:, None]  # (R, 1)
    dy = np.sin(angles)[:, None]
    ex = (segments[:, 2] - segments[:, 0])[None, :]  # (1, M)
    ey = (segments[:, 3] - segments[:, 1])[None, :]
    wx = (ox - segments[:, 0])[None, :]
    wy = (oy - segments[:, 1])[None, :]
    denom = ex * (-dy) + ey * dx
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ex * wy - ey * wx) / denom
        s = (wx * (-dy) + wy * dx) / denom
    hit = (np.abs(denom) > 1e-12) & (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
    t = np.where(hit, t, np.inf)
    return t.min(axis=1)


def point_segment_distances_numpy(px: float, py: float, segments: np.ndarray) -> np.ndarray:
    """Distance from a point to each segment of an (M, 4) array."""
    ax, ay = segments[:, 0], segments[:, 1]
    ex = segments[:, 2] - ax
    ey = segments[:, 3] - ay
    len2 = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        u = ((px - ax) * ex + (py - ay) * ey) / len2
    u = np.clip(np.where(len2 > 0.0, u, 0.0), 0.0, 1.0)
    cx = ax + u * ex
    cy = ay + u * ey
    return np.hypot(px - cx, py - cy)


def in_any_rect_numpy(px: float, py: float, rects: np.ndarray) -> bool:
    """Point-in-rectangle test against (N, 6) rows of cx,cy,hx,hy,cos,sin."""
    if rects.shape[0] == 0:
        return False
    dx = px - rects[:, 0]
    dy = py - rects[:, 1]
    lx = dx * rects[:, 4] + dy * rects[:, 5]
    ly = -dx * rects[:, 5] + dy * rects[:, 4]
    return bool(np.any((np.abs(lx) <= rects[:, 2]) & (np.abs(ly) <= rects[:, 3])))


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

_HAVE_NUMBA = False
if not _no_numba_requested():
    try:
        import numba

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def smooth8x8_numba(cells, kernel):
        out = np.zeros((GRID, GRID), dtype=np.float64)
        mac = 0
        for r in range(GRID):
            for c in range(GRID):
                acc = 0.0
                for i in range(KSIZE):
                    rr = r + i - PAD
                    for j in range(KSIZE):
                        cc = c + j - PAD
                        if 0 <= rr < GRID and 0 <= cc < GRID:
                            acc += kernel[i, j] * cells[rr, cc]
                        # out-of-grid neighbors are zero padding: the
                        # multiply still counts toward the MAC tally
                        mac += 1
                out[r, c] = acc
        return out, mac

    @numba.njit(cache=True)
    def cast_rays_numba(ox, oy, angles, segments):
        n = angles.shape[0]
        m = segments.shape[0]
        dists = np.full(n, np.inf)
        for i in range(n):
            dx = np.cos(angles[i])
            dy = np.sin(angles[i])
            best = np.inf
            for k in range(m):
                ex = segments[k, 2] - segments[k, 0]
                ey = segments[k, 3] - segments[k, 1]
                wx = ox - segments[k, 0]
                wy = oy - segments[k, 1]
                denom = ex * (-dy) + ey * dx
                if abs(denom) <= 1e-12:
                    continue
                t = (ex * wy - ey * wx) / denom
                s = (wx * (-dy) + wy * dx) / denom
                if t >= 0.0 and 0.0 <= s <= 1.0 and t < best:
                    best = t
            dists[i] = best
        return dists

    @numba.njit(cache=True)
    def point_segment_distances_numba(px, py, segments):
        m = segments.shape[0]
        out = np.empty(m)
        for k in range(m):
            ax = segments[k, 0]
            ay = segments[k, 1]
            ex = segments[k, 2] - ax
            ey = segments[k, 3] - ay
            len2 = ex * ex + ey * ey
            if len2 > 0.0:
                u = ((px - ax) * ex + (py - ay) * ey) / len2
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
            else:
                u = 0.0
            cx = ax + u * ex
            cy = ay + u * ey
            out[k] = np.hypot(px - cx, py - cy)
        return out

    @numba.njit(cache=True)
    def in_any_rect_numba(px, py, rects):
        for k in range(rects.shape[0]):
            dx = px - rects[k, 0]
            dy = py - rects[k, 1]
            lx = dx * rects[k, 4] + dy * rects[k, 5]
            ly = -dx * rects[k, 5] + dy * rects[k, 4]
            if abs(lx) <= rects[k, 2] and abs(ly) <= rects[k, 3]:
                return True
        return False

    BACKEND = "numba"
    smooth8x8 = smooth8x8_numba
    cast_rays = cast_rays_numba
    point_segment_distances = point_segment_distances_numba
    in_any_rect = in_any_rect_numba
else:
    BACKEND = "numpy"
    smooth8x8 = smooth8x8_numpy
    cast_rays = cast_rays_numpy
    point_segment_distances = point_segment_distances_numpy
    in_any_rect = in_any_rect_numpy


def warmup() -> None:
    """Trigger JIT compilation of the active kernels on dummy inputs."""
    cells = np.full((GRID, GRID), 4000.0)
    kernel = np.full((KSIZE, KSIZE), 1.0 / (KSIZE * KSIZE))
    smooth8x8(cells, kernel)
    segs = np.array([[1.0, -1.0, 1.0, 1.0]])
    cast_rays(0.0, 0.0, np.zeros(2), segs)
    point_segment_distances(0.0, 0.0, segs)
    in_any_rect(0.0, 0.0, np.array([[0.0, 0.0, 1.0, 1.0, 1.0, 0.0]]))

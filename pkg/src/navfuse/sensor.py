"""Ray-cast model of the front-looking 8x8 multizone range sensor.

Eight azimuth rays at the column centers span the 65-degree field of view
about the drone heading; the world is planar, so all eight rows replicate
the azimuth scan. Returns are in millimeters with Gaussian noise on real
hits; rays that hit nothing inside the 4 m range come back as invalid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .depth import GRID, RANGE_MAX_MM, RANGE_MIN_MM, DepthFrame


@dataclass(frozen=True)
class TofModel:
    fov_deg: float = 65.0
    cols: int = GRID
    rows: int = GRID
    range_min_m: float = 0.2
    range_max_m: float = 4.0
    rate_hz: float = 15.0
    noise_sigma_mm: float = 20.0


def ray_angles(heading: float, model: TofModel) -> np.ndarray:
    """World angles of the column-center rays; column 0 looks leftmost."""
    fov = math.radians(model.fov_deg)
    k = np.arange(model.cols, dtype=np.float64)
    return heading + fov / 2.0 - (k + 0.5) * (fov / model.cols)


def sense_tof(world, pose, model: TofModel, rng: np.random.Generator,
              tick: int = 0) -> DepthFrame:
    """One acquisition: nearest-hit distances per column, noised and clamped.

    The validity mask is noise-free: a column is invalid exactly when its
    ray has no intersection within the maximum range.
    """
    angles = ray_angles(pose.heading, model)
    dist_m = _kernels.cast_rays(pose.x, pose.y, angles, world.segments)
    noise = rng.normal(0.0, model.noise_sigma_mm, model.cols)

    valid_cols = dist_m <= model.range_max_m
    mm = np.where(valid_cols,
                  np.clip(np.where(np.isfinite(dist_m), dist_m, model.range_max_m)
                          * 1000.0 + noise, RANGE_MIN_MM, RANGE_MAX_MM),
                  RANGE_MAX_MM)

    cells = np.rint(np.tile(mm, (model.rows, 1))).astype(np.int32)
    validity = np.tile(valid_cols, (model.rows, 1))
    return DepthFrame(cells=cells, validity=validity, tick=tick)

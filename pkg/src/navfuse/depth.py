"""Local perception: 8x8 depth grid -> steering zone + central distance.

A raw frame from the multizone range sensor is smoothed with a zero-padded
5x5 Gaussian (the padding biases the free-space argmax toward the center
of the field of view), the column of the farthest smoothed cell picks a
steering zone, and the mean of the four central raw cells gives the
distance used to gate forward speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels

GRID = 8
KERNEL_SIZE = 5
RANGE_MIN_MM = 200.0   # sensor minimum range
RANGE_MAX_MM = 4000.0  # sensor maximum range; also the free-space fill value
MACS_PER_FRAME = GRID * GRID * KERNEL_SIZE * KERNEL_SIZE  # 1600

# zone boundaries over the 0..7 column index
LEFT_COLS = (0, 1, 2)
RIGHT_COLS = (5, 6, 7)
CENTER_COL = (GRID - 1) / 2.0  # 3.5


class Zone(Enum):
    """Steering suggestion extracted from the depth grid."""

    LEFT_TURN = "left_turn"
    NO_TURN = "no_turn"
    RIGHT_TURN = "right_turn"


def zone_of_column(col: int) -> Zone:
    if col in LEFT_COLS:
        return Zone.LEFT_TURN
    if col in RIGHT_COLS:
        return Zone.RIGHT_TURN
    return Zone.NO_TURN


@dataclass(frozen=True)
class DepthFrame:
    """One 8x8 range acquisition in millimeters plus a validity mask."""

    cells: np.ndarray    # (8, 8) integer millimeters
    validity: np.ndarray  # (8, 8) bool, False where the sensor had no target
    tick: int = 0

    def __post_init__(self):
        cells = np.asarray(self.cells)
        validity = np.asarray(self.validity, dtype=bool)
        if cells.shape != (GRID, GRID):
            raise ValueError(f"depth frame must be {GRID}x{GRID}, got {cells.shape}")
        if validity.shape != (GRID, GRID):
            raise ValueError(f"validity mask must be {GRID}x{GRID}, got {validity.shape}")
        valid_vals = cells[validity]
        if valid_vals.size and (valid_vals.min() < RANGE_MIN_MM or valid_vals.max() > RANGE_MAX_MM):
            raise ValueError("valid cells must lie within the sensor range "
                             f"[{RANGE_MIN_MM:.0f}, {RANGE_MAX_MM:.0f}] mm")
        object.__setattr__(self, "cells", cells.astype(np.int32))
        object.__setattr__(self, "validity", validity)

    def filled(self) -> np.ndarray:
        """Cells as float64 with invalid entries replaced by max range."""
        out = self.cells.astype(np.float64)
        out[~self.validity] = RANGE_MAX_MM
        return out

    def to_csv_row(self) -> str:
        """Serialize: 64 ints row-major, validity bitmask as hex, tick."""
        vals = ",".join(str(int(v)) for v in self.cells.reshape(-1))
        mask = 0
        flat = self.validity.reshape(-1)
        for i in range(GRID * GRID):
            if flat[i]:
                mask |= 1 << i
        return f"{vals},0x{mask:016x},{self.tick}"

    @classmethod
    def from_csv_row(cls, row: str) -> "DepthFrame":
        parts = row.strip().split(",")
        if len(parts) != GRID * GRID + 2:
            raise ValueError(f"expected {GRID * GRID + 2} fields, got {len(parts)}")
        cells = np.array([int(p) for p in parts[:GRID * GRID]], dtype=np.int32).reshape(GRID, GRID)
        mask = int(parts[GRID * GRID], 16)
        validity = np.array([(mask >> i) & 1 for i in range(GRID * GRID)], dtype=bool).reshape(GRID, GRID)
        return cls(cells=cells, validity=validity, tick=int(parts[-1]))


@dataclass(frozen=True)
class SmoothedFrame:
    """Output of the smoothing pass, same shape as the input frame."""

    cells: np.ndarray  # (8, 8) float64 millimeters
    mac_count: int


@dataclass(frozen=True)
class LocalPercept:
    """Steering zone and central obstacle distance for one frame."""

    x_dmax: int    # column of the farthest smoothed cell, 0..7
    zone: Zone
    d_c: float     # mean of the four central raw cells, mm


def gaussian_kernel(sigma: float = 1.0, size: int = KERNEL_SIZE) -> np.ndarray:
    """Normalized 2-D Gaussian sampled at integer offsets."""
    if size % 2 != 1 or size < 1:
        raise ValueError("kernel size must be odd and positive")
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g1 = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
    k = np.outer(g1, g1)
    return k / k.sum()


def _validate_kernel(kernel: np.ndarray) -> np.ndarray:
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.shape != (KERNEL_SIZE, KERNEL_SIZE):
        raise ValueError(f"kernel must be {KERNEL_SIZE}x{KERNEL_SIZE}, got {kernel.shape}")
    if not np.all(kernel > 0.0):
        raise ValueError("kernel weights must all be positive")
    if abs(kernel.sum() - 1.0) > 1e-9:
        raise ValueError("kernel must be normalized to sum 1")
    return kernel


def smooth_depth(frame: DepthFrame, kernel: np.ndarray) -> SmoothedFrame:
    """Convolve the frame with a zero-padded Gaussian kernel.

    Invalid cells are substituted with the max range (4000 mm) before the
    convolution; the zero padding drags the border cells down, which biases
    the later argmax toward the center of the grid.
    """
    kernel = _validate_kernel(kernel)
    cells, mac = _kernels.smooth8x8(frame.filled(), kernel)
    return SmoothedFrame(cells=cells, mac_count=int(mac))


def argmax_center_biased(cells: np.ndarray) -> tuple[int, int]:
    """Grid argmax; ties prefer the column nearest the grid center,
    then the lower row, then the lower column."""
    peak = cells.max()
    rows, cols = np.nonzero(cells == peak)
    order = np.lexsort((cols, rows, np.abs(cols - CENTER_COL)))
    i = order[0]
    return int(rows[i]), int(cols[i])


def extract_percept(sm: SmoothedFrame, raw: DepthFrame) -> LocalPercept:
    """Pick the steering zone from the smoothed map and the central
    distance from the raw frame."""
    _, x_dmax = argmax_center_biased(sm.cells)
    center = raw.filled()[3:5, 3:5]
    d_c = float(center.mean())
    return LocalPercept(x_dmax=x_dmax, zone=zone_of_column(x_dmax), d_c=d_c)

"""Global perception: steering + collision probability from the vision channel.

In flight this signal comes from a camera navigation network; in the
simulator a geometric lane-following oracle stands in for it. The oracle
steers toward a lookahead point on the lane path and deliberately reports
zero collision probability: it sees the painted lane, never the obstacles,
which is exactly the failure mode the isolated global pipeline shows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

CAMERA_FOV_DEG = 115.0


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class GlobalPercept:
    """Steering in [-1, 1] (positive = left) and collision probability."""

    theta: float
    p_col: float

    def __post_init__(self):
        object.__setattr__(self, "theta", clamp(float(self.theta), -1.0, 1.0))
        object.__setattr__(self, "p_col", clamp(float(self.p_col), 0.0, 1.0))


class SteeringClass(Enum):
    LEFT = "left"
    STRAIGHT = "straight"
    RIGHT = "right"


@dataclass(frozen=True)
class OracleParams:
    lookahead_m: float = 2.0
    camera_fov_deg: float = CAMERA_FOV_DEG


class LanePath:
    """Polyline traced by the floor lane marking, start to end."""

    def __init__(self, waypoints) -> None:
        pts = np.asarray(waypoints, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("lane path needs at least two 2-D waypoints")
        deltas = np.diff(pts, axis=0)
        seg_len = np.hypot(deltas[:, 0], deltas[:, 1])
        if np.any(seg_len == 0.0):
            raise ValueError("consecutive lane waypoints must be distinct")
        self.points = pts
        self._seg_len = seg_len
        self._cum = np.concatenate(([0.0], np.cumsum(seg_len)))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def project(self, x: float, y: float) -> float:
        """Arc length of the closest point on the path to (x, y)."""
        p = np.array([x, y])
        a = self.points[:-1]
        d = np.diff(self.points, axis=0)
        t = np.einsum("ij,ij->i", p - a, d) / (self._seg_len ** 2)
        t = np.clip(t, 0.0, 1.0)
        closest = a + t[:, None] * d
        dist2 = np.sum((closest - p) ** 2, axis=1)
        k = int(np.argmin(dist2))
        return float(self._cum[k] + t[k] * self._seg_len[k])

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc length s, clamped to the path ends."""
        s = clamp(s, 0.0, self.length)
        k = int(np.searchsorted(self._cum, s, side="right")) - 1
        k = min(max(k, 0), len(self._seg_len) - 1)
        t = (s - self._cum[k]) / self._seg_len[k]
        p = self.points[k] + t * (self.points[k + 1] - self.points[k])
        return float(p[0]), float(p[1])

    def mirrored(self) -> "LanePath":
        pts = self.points.copy()
        pts[:, 1] = -pts[:, 1]
        return LanePath(pts)


def lane_oracle(pose, path: LanePath, params: OracleParams) -> GlobalPercept:
    """Bearing to the lookahead point, rescaled by the camera half-FOV.

    Obstacles are invisible to this signal by construction; collision
    probability is always zero. Past the final waypoint the oracle goes
    neutral.
    """
    s = path.project(pose.x, pose.y)
    if s >= path.length - 1e-9:
        return GlobalPercept(theta=0.0, p_col=0.0)
    tx, ty = path.point_at(s + params.lookahead_m)
    bearing = wrap_angle(math.atan2(ty - pose.y, tx - pose.x) - pose.heading)
    half_fov = math.radians(params.camera_fov_deg) / 2.0
    return GlobalPercept(theta=clamp(bearing / half_fov, -1.0, 1.0), p_col=0.0)


def forced_percept() -> GlobalPercept:
    """Neutral percept used when the local pipeline runs in isolation."""
    return GlobalPercept(theta=0.0, p_col=0.0)


def discretize_steering(g: GlobalPercept, eta: float) -> SteeringClass:
    """Threshold the continuous steering into left/straight/right.

    Boundary values |theta| == eta count as straight, which damps
    oscillation around the threshold.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if g.theta > eta:
        return SteeringClass.LEFT
    if g.theta < -eta:
        return SteeringClass.RIGHT
    return SteeringClass.STRAIGHT


def vision_speed(g: GlobalPercept, v_target: float) -> float:
    """Forward speed shrinking linearly with collision probability."""
    if v_target <= 0.0:
        raise ValueError("v_target must be positive")
    return clamp(v_target * (1.0 - g.p_col), 0.0, v_target)


def vision_yaw(g: GlobalPercept, yaw_target: float) -> float:
    """Steering rescaled to a yaw rate (deg/s); global-only mode."""
    if yaw_target <= 0.0:
        raise ValueError("yaw_target must be positive")
    return g.theta * yaw_target

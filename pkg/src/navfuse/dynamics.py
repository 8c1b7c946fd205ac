"""Unicycle kinematics at the fixed control tick."""

from __future__ import annotations

import math

from .fusion import FusionCommand
from .world import DronePose

CONTROL_DT = 1.0 / 15.0  # control tick, s


def step_dynamics(pose: DronePose, cmd: FusionCommand, dt: float = CONTROL_DT) -> DronePose:
    """Integrate one tick: yaw first, then translate along the new heading."""
    heading = pose.heading + math.radians(cmd.yaw_rate) * dt
    x = pose.x + cmd.v_f * math.cos(heading) * dt
    y = pose.y + cmd.v_f * math.sin(heading) * dt
    return DronePose(x=x, y=y, heading=heading, radius=pose.radius)

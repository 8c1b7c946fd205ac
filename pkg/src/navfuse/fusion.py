"""Fusion of the two steering sources via a lookup table.

Every (steering class, depth zone) pair maps to an agreement bit and a yaw
rate drawn from {0, +-half, +-full} of the target yaw rate. Agreement on a
direction turns at full rate; a lone turn suggestion gets half rate. On
opposite suggestions the forward speed is gated to zero and the drone
yaws at half rate toward the side the semantic channel points: the lane
signal carries the route, the depth veto holds speed until the geometry
agrees. (A zero-yaw conflict cell would be an absorbing state in a static
scene: with speed gated and both inputs frozen, nothing ever changes.)
Forward speed otherwise follows a step schedule over the central
distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .depth import DepthFrame, LocalPercept, RANGE_MAX_MM, RANGE_MIN_MM, extract_percept, smooth_depth
from .vision import GlobalPercept, SteeringClass, discretize_steering, forced_percept, vision_speed, vision_yaw

# yaw table entries as fractions of the target yaw rate; positive = left
YAW_FRACTIONS = (-1.0, -0.5, 0.0, 0.5, 1.0)

# the two cells where the sources point opposite ways
CONFLICT_CELLS = frozenset({
    (SteeringClass.LEFT, "right_turn"),
    (SteeringClass.RIGHT, "left_turn"),
})


class PipelineMode(Enum):
    GLOBAL_ONLY = "global"
    LOCAL_ONLY = "local"
    FUSED = "fused"


@dataclass(frozen=True)
class FusionCommand:
    """Control output of one tick: agreement bit, yaw (deg/s), speed (m/s)."""

    agree: int
    yaw_rate: float
    v_f: float

    def __post_init__(self):
        if self.agree not in (0, 1):
            raise ValueError("agree must be 0 or 1")
        if self.agree == 0 and self.v_f != 0.0:
            raise ValueError("zero agreement must gate forward speed to zero")


def _default_entries() -> dict:
    # direction sum of the two sources, halved: full on agreement, half
    # when one source is neutral, zero on neutral/neutral; conflict cells
    # gate the speed and re-orient at half rate toward the semantic side
    dirs = {SteeringClass.LEFT: 1.0, SteeringClass.STRAIGHT: 0.0, SteeringClass.RIGHT: -1.0}
    zdirs = {"left_turn": 1.0, "no_turn": 0.0, "right_turn": -1.0}
    entries = {}
    for sc, sd in dirs.items():
        for zone, zd in zdirs.items():
            if (sc, zone) in CONFLICT_CELLS:
                entries[(sc, zone)] = (0, sd / 2.0)
            else:
                entries[(sc, zone)] = (1, (sd + zd) / 2.0)
    return entries


@dataclass(frozen=True)
class FusionTable:
    """Total map (steering class x zone) -> (agreement bit, yaw fraction)."""

    entries: dict = field(default_factory=_default_entries)

    def __post_init__(self):
        zones = ("left_turn", "no_turn", "right_turn")
        for sc in SteeringClass:
            for zone in zones:
                key = (sc, zone)
                if key not in self.entries:
                    raise ValueError(f"fusion table missing cell {sc.value}/{zone}")
                agree, yaw = self.entries[key]
                if agree != (0 if key in CONFLICT_CELLS else 1):
                    raise ValueError(f"agreement bit of cell {sc.value}/{zone} must be "
                                     f"{0 if key in CONFLICT_CELLS else 1}")
                if yaw not in YAW_FRACTIONS:
                    raise ValueError(f"yaw fraction of cell {sc.value}/{zone} must be one of {YAW_FRACTIONS}")
        if len(self.entries) != 9:
            raise ValueError("fusion table must have exactly 9 cells")

    def lookup(self, sc: SteeringClass, zone) -> tuple[int, float]:
        key = zone.value if hasattr(zone, "value") else str(zone)
        return self.entries[(sc, key)]

    def rows(self):
        """All 9 cells in display order: (class, zone, agree, yaw fraction)."""
        zones = ("left_turn", "no_turn", "right_turn")
        for sc in (SteeringClass.LEFT, SteeringClass.STRAIGHT, SteeringClass.RIGHT):
            for zone in zones:
                agree, yaw = self.entries[(sc, zone)]
                yield sc, zone, agree, yaw


@dataclass(frozen=True)
class SpeedSchedule:
    """Step function from central distance (mm) to a fraction of v_t.

    Steps are (lower bound mm, fraction) pairs; the fraction of the
    largest bound not exceeding d_c applies.
    """

    steps: tuple = ((2000.0, 1.0), (1000.0, 0.5), (500.0, 0.25), (0.0, 0.0))

    def __post_init__(self):
        bounds = [b for b, _ in self.steps]
        fracs = [f for _, f in self.steps]
        if sorted(bounds, reverse=True) != bounds or len(set(bounds)) != len(bounds):
            raise ValueError("schedule bounds must be strictly decreasing")
        if bounds[-1] != 0.0:
            raise ValueError("schedule must end with a 0 mm bound")
        if any(not 0.0 <= f <= 1.0 for f in fracs):
            raise ValueError("schedule fractions must lie in [0, 1]")
        if sorted(fracs, reverse=True) != fracs:
            raise ValueError("schedule fractions must be non-increasing with distance")

    def fraction(self, d_c: float) -> float:
        for bound, frac in self.steps:
            if d_c >= bound:
                return frac
        return 0.0


def fuse(sc: SteeringClass, lp: LocalPercept, yaw_target: float,
         table: FusionTable | None = None) -> tuple[int, float]:
    """Table lookup: agreement bit and yaw rate in deg/s."""
    if yaw_target <= 0.0:
        raise ValueError("yaw_target must be positive")
    agree, yaw_frac = (table or FusionTable()).lookup(sc, lp.zone)
    return agree, yaw_frac * yaw_target


def speed_command(agree: int, d_c: float, schedule: SpeedSchedule, v_t: float) -> float:
    """Step-scheduled forward speed, gated to zero on disagreement."""
    if not RANGE_MIN_MM <= d_c <= RANGE_MAX_MM:
        raise ValueError(f"d_c out of sensor range: {d_c}")
    return agree * v_t * schedule.fraction(d_c)


@dataclass(frozen=True)
class ControlParams:
    """Everything one control tick needs besides the sensor inputs."""

    kernel: object            # 5x5 smoothing kernel (np.ndarray)
    v_t: float = 1.5          # target forward speed, m/s
    yaw_t: float = 60.0       # target yaw rate, deg/s
    eta: float = 0.1          # steering discretization threshold
    schedule: SpeedSchedule = SpeedSchedule()
    table: FusionTable = field(default_factory=FusionTable)


@dataclass(frozen=True)
class StepTrace:
    """Command plus the intermediate percepts, for telemetry."""

    command: FusionCommand
    local: LocalPercept
    glob: GlobalPercept
    steering: SteeringClass


def pipeline_step_trace(mode: PipelineMode, frame: DepthFrame, g: GlobalPercept,
                        params: ControlParams) -> StepTrace:
    """One control tick with intermediates exposed.

    The local percept is computed in every mode so telemetry stays
    uniform; global-only control ignores it.
    """
    local = extract_percept(smooth_depth(frame, params.kernel), frame)
    if mode is PipelineMode.GLOBAL_ONLY:
        cmd = FusionCommand(agree=1, yaw_rate=vision_yaw(g, params.yaw_t),
                            v_f=vision_speed(g, params.v_t))
        return StepTrace(cmd, local, g, discretize_steering(g, params.eta))
    if mode is PipelineMode.LOCAL_ONLY:
        g = forced_percept()
    sc = discretize_steering(g, params.eta)
    agree, yaw = fuse(sc, local, params.yaw_t, params.table)
    v_f = speed_command(agree, local.d_c, params.schedule, params.v_t)
    return StepTrace(FusionCommand(agree=agree, yaw_rate=yaw, v_f=v_f), local, g, sc)


def pipeline_step(mode: PipelineMode, frame: DepthFrame, g: GlobalPercept,
                  params: ControlParams) -> FusionCommand:
    """One control tick: sensor inputs to a drone command."""
    return pipeline_step_trace(mode, frame, g, params).command

"""Deterministic 2D corridor world: geometry, scenarios, status checks.

Three benchmark scenarios share one floor plan: a straight corridor with
a 90-degree side branch near its end, the corridor itself running on past
the branch mouth into a dead end. The goal region sits at the bottom of
the branch and the lane marking turns into it. Scenario 1 is
obstacle-free with a right branch, scenario 2 adds four 1 m-wide
obstacles straddling the lane in the straight section, scenario 3
mirrors scenario 2 into a left branch. Because the lane runs straight
through the obstacle field, a pure lane follower must hit the obstacles;
because the branch is marked only by the lane, a lane-blind drone flies
past it into the dead end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .vision import LanePath, wrap_angle

DRONE_RADIUS_M = 0.05  # 10 cm diameter airframe


class Status(Enum):
    RUNNING = "running"
    SUCCESS = "success"
    COLLISION = "collision"
    TIMEOUT = "timeout"


class Section(Enum):
    STRAIGHT = "straight"
    TURN = "turn"


@dataclass(frozen=True)
class DronePose:
    x: float
    y: float
    heading: float  # radians, normalized to (-pi, pi]
    radius: float = DRONE_RADIUS_M

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))


@dataclass(frozen=True)
class Rect:
    """Oriented rectangle: center, half extents, rotation."""

    cx: float
    cy: float
    hx: float
    hy: float
    angle: float = 0.0

    def corners(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        local = np.array([[-self.hx, -self.hy], [self.hx, -self.hy],
                          [self.hx, self.hy], [-self.hx, self.hy]])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.array([self.cx, self.cy])

    def edges(self) -> np.ndarray:
        p = self.corners()
        q = np.roll(p, -1, axis=0)
        return np.hstack([p, q])

    def contains(self, x: float, y: float) -> bool:
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx, dy = x - self.cx, y - self.cy
        lx = dx * c + dy * s
        ly = -dx * s + dy * c
        return abs(lx) <= self.hx and abs(ly) <= self.hy

    def as_row(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.hx, self.hy,
                         math.cos(self.angle), math.sin(self.angle)])

    def mirrored(self) -> "Rect":
        return Rect(self.cx, -self.cy, self.hx, self.hy, -self.angle)


class World:
    """Immutable scene: walls, obstacles, lane, start, goal, sections."""

    def __init__(self, walls, obstacles, lane: LanePath, start_pose: DronePose,
                 end_region: Rect, sections) -> None:
        self.walls = [tuple(map(float, w)) for w in walls]  # (x1, y1, x2, y2)
        self.obstacles = list(obstacles)
        self.lane = lane
        self.start_pose = start_pose
        self.end_region = end_region
        self.sections = list(sections)  # (Section, Rect), turn entries first

        segs = [list(w) for w in self.walls]
        for ob in self.obstacles:
            segs.extend(ob.edges().tolist())
        self._segments = np.asarray(segs, dtype=np.float64).reshape(-1, 4)
        self._rect_rows = (np.vstack([ob.as_row() for ob in self.obstacles])
                           if self.obstacles else np.zeros((0, 6)))

    @property
    def segments(self) -> np.ndarray:
        """All wall and obstacle-edge segments, one (x1,y1,x2,y2) row each."""
        return self._segments

    @property
    def obstacle_rows(self) -> np.ndarray:
        return self._rect_rows

    def in_collision(self, pose: DronePose) -> bool:
        dists = _kernels.point_segment_distances(pose.x, pose.y, self._segments)
        if dists.size and float(dists.min()) <= pose.radius:
            return True
        return _kernels.in_any_rect(pose.x, pose.y, self._rect_rows)

    def section_at(self, pose: DronePose) -> Section:
        # turn rects are listed first so boundary poses attribute to the turn
        for label, rect in self.sections:
            if rect.contains(pose.x, pose.y):
                return label
        return Section.STRAIGHT

    def mirrored(self) -> "World":
        walls = [(x1, -y1, x2, -y2) for x1, y1, x2, y2 in self.walls]
        obstacles = [ob.mirrored() for ob in self.obstacles]
        start = DronePose(self.start_pose.x, -self.start_pose.y,
                          -self.start_pose.heading, self.start_pose.radius)
        sections = [(label, rect.mirrored()) for label, rect in self.sections]
        return World(walls, obstacles, self.lane.mirrored(), start,
                     self.end_region.mirrored(), sections)


def check_status(world: World, pose: DronePose, tick: int, t_max: float,
                 dt: float = 1.0 / 15.0) -> Status:
    """Collision beats success in the same tick; then goal, then timeout."""
    if world.in_collision(pose):
        return Status.COLLISION
    if world.end_region.contains(pose.x, pose.y):
        return Status.SUCCESS
    if tick * dt > t_max:
        return Status.TIMEOUT
    return Status.RUNNING


@dataclass(frozen=True)
class ScenarioParams:
    """Corridor geometry knobs; defaults reproduce the benchmark worlds.

    The main corridor continues past the turn mouth into a dead-end stub,
    the way an office corridor runs past a side branch: the lane marking
    turns into the branch, so only lane-aware pipelines leave the main
    corridor, while a purely depth-driven drone flies on and dead-ends.
    """

    width: float = 4.0            # corridor width, m
    turn_at: float = 13.5         # straight/turn boundary: near edge of the mouth, m
    stub: float = 4.0             # dead-end continuation past the far mouth edge, m
    exit_leg: float = 8.0         # branch leg length below the mouth, m
    end_depth: float = 1.0        # final stretch of the exit leg = goal region
    start_x: float = 0.5
    n_obstacles: int = 4
    obstacle_first: float = 3.0   # distance from start pose to first obstacle center, m
    obstacle_spacing: float = 3.0
    obstacle_offset: float = 0.45  # lateral obstacle center offset, alternating sides
    obstacle_width: float = 1.0   # across the corridor
    obstacle_depth: float = 0.3   # along the corridor
    drone_radius: float = DRONE_RADIUS_M
    section_pad: float = 0.25     # slack so overshoot poses still classify


SCENARIO_IDS = ("S1", "S2", "S3")


def _right_turn_world(params: ScenarioParams, with_obstacles: bool) -> World:
    half = params.width / 2.0
    x_in = params.turn_at                     # near (inner) edge of the turn mouth
    x_out = x_in + params.width               # far edge of the turn mouth
    x_end = x_out + params.stub               # dead-end wall of the main corridor
    y_bot = -half - params.exit_leg           # bottom wall of the exit leg

    walls = [
        (0.0, half, x_end, half),             # north wall
        (x_end, half, x_end, -half),          # dead-end wall past the mouth
        (x_out, -half, x_end, -half),         # south wall beyond the mouth
        (0.0, -half, x_in, -half),            # south wall up to the mouth
        (x_in, -half, x_in, y_bot),           # inner wall of the exit leg
        (x_out, -half, x_out, y_bot),         # outer wall of the exit leg
        (x_in, y_bot, x_out, y_bot),          # end of the exit leg
        (0.0, -half, 0.0, half),              # start cap
    ]

    obstacles = []
    if with_obstacles:
        side = 1.0
        for k in range(params.n_obstacles):
            cx = params.start_x + params.obstacle_first + k * params.obstacle_spacing
            obstacles.append(Rect(cx, side * params.obstacle_offset,
                                  params.obstacle_depth / 2.0,
                                  params.obstacle_width / 2.0))
            side = -side

    leg_mid = (x_in + x_out) / 2.0
    lane = LanePath([(0.0, 0.0), (leg_mid, 0.0), (leg_mid, y_bot + params.end_depth / 2.0)])
    start = DronePose(params.start_x, 0.0, 0.0, params.drone_radius)
    end_region = Rect(leg_mid, y_bot + params.end_depth / 2.0,
                      params.width / 2.0, params.end_depth / 2.0)

    pad = params.section_pad
    sections = [
        (Section.TURN, Rect((x_in + x_end) / 2.0, 0.0,
                            (x_end - x_in) / 2.0 + pad, half + pad)),
        (Section.TURN, Rect(leg_mid, (-half + y_bot) / 2.0,
                            params.width / 2.0 + pad, (abs(y_bot) - half) / 2.0 + pad)),
        (Section.STRAIGHT, Rect(x_in / 2.0, 0.0, x_in / 2.0 + pad, half + pad)),
    ]
    return World(walls, obstacles, lane, start, end_region, sections)


def build_scenario(scenario_id: str, params: ScenarioParams | None = None) -> World:
    """S1: right turn, clear. S2: right turn + obstacles. S3: mirrored S2."""
    params = params or ScenarioParams()
    if scenario_id == "S1":
        return _right_turn_world(params, with_obstacles=False)
    if scenario_id == "S2":
        return _right_turn_world(params, with_obstacles=True)
    if scenario_id == "S3":
        return _right_turn_world(params, with_obstacles=True).mirrored()
    raise ValueError(f"unknown scenario {scenario_id!r}, expected one of {SCENARIO_IDS}")

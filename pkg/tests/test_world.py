"""Scenario geometry, collision detection and status tests."""

import math

import numpy as np
import pytest

from navfuse.config import RunConfig, trial_params
from navfuse.fusion import PipelineMode
from navfuse.harness import run_trial
from navfuse.vision import LanePath
from navfuse.world import (DronePose, Rect, ScenarioParams, Section, Status,
                           World, build_scenario, check_status)


def disc_rect_distance_oracle(px, py, rect, samples=20000):
    """Brute force: densely sample the rectangle boundary."""
    corners = rect.corners()
    best = math.inf
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        for t in np.linspace(0.0, 1.0, samples // 4):
            q = a + t * (b - a)
            best = min(best, math.hypot(px - q[0], py - q[1]))
    if rect.contains(px, py):
        return 0.0
    return best


def tiny_world(obstacles=(), end=Rect(9.0, 0.0, 0.5, 0.5)):
    walls = [(0, 1, 10, 1), (0, -1, 10, -1), (0, -1, 0, 1), (10, -1, 10, 1)]
    lane = LanePath([(0, 0), (10, 0)])
    sections = [(Section.TURN, Rect(7.5, 0.0, 2.5, 1.5)),
                (Section.STRAIGHT, Rect(2.5, 0.0, 2.6, 1.5))]
    return World(walls, list(obstacles), lane, DronePose(0.5, 0.0, 0.0),
                 end, sections)


class TestScenarios:
    def test_s1_has_no_obstacles(self):
        assert build_scenario("S1").obstacles == []

    def test_s2_has_four_one_meter_obstacles(self):
        obstacles = build_scenario("S2").obstacles
        assert len(obstacles) == 4
        for ob in obstacles:
            assert 2 * ob.hy == pytest.approx(1.0)  # width across the corridor
        sides = [math.copysign(1, ob.cy) for ob in obstacles]
        assert sides == [1.0, -1.0, 1.0, -1.0]

    def test_s3_is_mirrored_s2(self):
        s2, s3 = build_scenario("S2"), build_scenario("S3")
        for (x1, y1, x2, y2), (mx1, my1, mx2, my2) in zip(s2.walls, s3.walls):
            assert (mx1, my1, mx2, my2) == pytest.approx((x1, -y1, x2, -y2))
        for a, b in zip(s2.obstacles, s3.obstacles):
            assert (b.cx, b.cy) == pytest.approx((a.cx, -a.cy))
        assert np.allclose(s3.lane.points[:, 1], -s2.lane.points[:, 1])
        assert s3.end_region.cy == pytest.approx(-s2.end_region.cy)

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError):
            build_scenario("S9")

    def test_start_pose_is_collision_free(self):
        for sid in ("S1", "S2", "S3"):
            world = build_scenario(sid)
            assert not world.in_collision(world.start_pose)

    def test_obstacles_block_the_lane(self):
        world = build_scenario("S2")
        for ob in world.obstacles:
            assert world.in_collision(DronePose(ob.cx, 0.0, 0.0))


class TestCollision:
    def test_disc_grazing_rect_corner(self):
        rect = Rect(2.0, 1.0, 0.15, 0.5)
        world = tiny_world(obstacles=[rect])
        corner = rect.corners()[0]  # (1.85, 0.5)
        radius = 0.05
        direction = np.array([-1.0, -1.0]) / math.sqrt(2)
        inside = corner + direction * (radius - 0.001)
        outside = corner + direction * (radius + 0.001)
        assert world.in_collision(DronePose(inside[0], inside[1], 0.0))
        assert not world.in_collision(DronePose(outside[0], outside[1], 0.0))
        assert disc_rect_distance_oracle(*inside, rect) < radius
        assert disc_rect_distance_oracle(*outside, rect) > radius

    def test_point_inside_rect_collides(self):
        rect = Rect(2.0, 0.0, 0.5, 0.5)
        world = tiny_world(obstacles=[rect])
        assert world.in_collision(DronePose(2.0, 0.0, 0.0))

    def test_rotated_rect_distance_matches_oracle(self):
        rect = Rect(2.0, 0.2, 0.4, 0.2, angle=math.radians(30))
        world = tiny_world(obstacles=[rect])
        rng = np.random.default_rng(6)
        for _ in range(40):
            px, py = rng.uniform(1.0, 3.0), rng.uniform(-0.8, 0.8)
            want = disc_rect_distance_oracle(px, py, rect) <= 0.05
            assert world.in_collision(DronePose(px, py, 0.0)) == want or (
                # wall proximity can also collide; only assert when clear of walls
                abs(py) > 0.9)

    def test_wall_contact(self):
        world = tiny_world()
        assert world.in_collision(DronePose(5.0, 0.96, 0.0))
        assert not world.in_collision(DronePose(5.0, 0.94, 0.0))


class TestStatus:
    def test_start_running(self):
        world = tiny_world()
        assert check_status(world, world.start_pose, 0, 120.0) is Status.RUNNING

    def test_success_in_end_region(self):
        world = tiny_world()
        assert check_status(world, DronePose(9.0, 0.0, 0.0), 5, 120.0) is Status.SUCCESS

    def test_collision_beats_success(self):
        # end region flush against the wall: pose inside both
        world = tiny_world(end=Rect(9.0, 0.75, 1.0, 0.3))
        pose = DronePose(9.0, 0.97, 0.0)
        assert world.end_region.contains(pose.x, pose.y)
        assert check_status(world, pose, 5, 120.0) is Status.COLLISION

    def test_timeout_strictly_after_t_max(self):
        world = tiny_world()
        pose = DronePose(2.0, 0.0, 0.0)
        dt = 1.0 / 15.0
        assert check_status(world, pose, 1800, 120.0, dt) is Status.RUNNING
        assert check_status(world, pose, 1801, 120.0, dt) is Status.TIMEOUT

    def test_section_boundary_attributes_to_turn(self):
        world = build_scenario("S1")
        boundary_x = ScenarioParams().turn_at
        assert world.section_at(DronePose(boundary_x, 0.0, 0.0)) is Section.TURN
        assert world.section_at(DronePose(boundary_x - 0.3, 0.0, 0.0)) is Section.STRAIGHT


class TestDeterminismAndSoundness:
    def test_identical_seeds_identical_trajectories(self):
        cfg = RunConfig()
        params = trial_params(cfg)
        world = build_scenario("S2")
        a = run_trial(world, PipelineMode.FUSED, 1234, params, scenario="S2")
        b = run_trial(world, PipelineMode.FUSED, 1234, params, scenario="S2")
        assert a.outcome == b.outcome and a.ticks == b.ticks
        assert a.telemetry == b.telemetry

    def test_zero_speed_freezes_position(self):
        from navfuse.dynamics import step_dynamics
        from navfuse.fusion import FusionCommand

        pose = DronePose(1.0, 0.5, 0.3)
        for _ in range(50):
            new = step_dynamics(pose, FusionCommand(0, 30.0, 0.0))
            assert (new.x, new.y) == (pose.x, pose.y)
            pose = new

    def test_success_trajectory_never_in_collision(self):
        # independent post-hoc sweep with its own distance math
        cfg = RunConfig()
        params = trial_params(cfg)
        world = build_scenario("S2")
        rec = run_trial(world, PipelineMode.FUSED, 42, params, scenario="S2")
        assert rec.outcome is Status.SUCCESS
        segs = world.segments
        for row in rec.telemetry:
            px, py = row[1], row[2]
            ax, ay = segs[:, 0], segs[:, 1]
            ex, ey = segs[:, 2] - ax, segs[:, 3] - ay
            len2 = np.maximum(ex * ex + ey * ey, 1e-30)
            u = np.clip(((px - ax) * ex + (py - ay) * ey) / len2, 0.0, 1.0)
            d = np.hypot(px - (ax + u * ex), py - (ay + u * ey))
            assert d.min() > 0.05
            for ob in world.obstacles:
                assert not ob.contains(px, py)

"""Arena geometry, swept-disc motion, signal occlusion, and the random walk."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from foragesim.arena import (
    Arena,
    Barrier,
    MAX_TURN_RATE_RAD_S,
    Pose,
    RobotBody,
    point_segment_distance,
    random_walk_policy,
    segments_intersect,
    signal_visible,
    step_motion,
    sweep_move,
    wrap_angle,
)


# -- angles and geometry helpers ---------------------------------------------


@given(st.floats(min_value=-100.0, max_value=100.0))
def test_wrap_angle_lands_in_range(a):
    w = wrap_angle(a)
    assert 0.0 <= w < 2 * math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)


def test_point_segment_distance_cases():
    assert point_segment_distance(0, 5, -10, 0, 10, 0) == 5.0
    assert point_segment_distance(15, 0, -10, 0, 10, 0) == 5.0  # past the end
    assert point_segment_distance(3, 4, 0, 0, 0, 0) == 5.0      # degenerate


def test_segments_intersect_cases():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    # shared endpoint counts
    assert segments_intersect((0, 0), (1, 1), (1, 1), (2, 0))
    # collinear overlap counts
    assert segments_intersect((0, 0), (3, 0), (2, 0), (5, 0))


# -- motion commands ---------------------------------------------------------


def test_forward_covers_speed_times_dt():
    arena = Arena()
    pose, contact = step_motion(Pose(10, 10, 0.0), ("forward",), 0.5, arena)
    assert pose.x == pytest.approx(25.0)
    assert pose.y == pytest.approx(10.0)
    assert not contact


def test_forward_distance_cap_pulls_up_at_target():
    arena = Arena()
    pose, _ = step_motion(Pose(10, 10, 0.0), ("forward", 5.0), 0.5, arena)
    assert pose.x == pytest.approx(15.0)


def test_rotation_clamps_to_turn_rate():
    arena = Arena()
    pose, _ = step_motion(Pose(10, 10, 0.0), ("rotate", 10.0), 0.5, arena)
    assert pose.heading == pytest.approx(MAX_TURN_RATE_RAD_S * 0.5)
    pose, _ = step_motion(Pose(10, 10, 0.0), ("rotate", -10.0), 0.5, arena)
    assert pose.heading == pytest.approx(wrap_angle(-MAX_TURN_RATE_RAD_S * 0.5))


def test_stop_and_zero_dt_hold_position():
    arena = Arena()
    start = Pose(10, 10, 1.0)
    pose, contact = step_motion(start, ("stop",), 0.5, arena)
    assert (pose.x, pose.y, pose.heading) == (10, 10, 1.0)
    pose, _ = step_motion(start, ("forward",), 0.0, arena)
    assert (pose.x, pose.y) == (10, 10)


def test_unknown_command_and_negative_dt_raise():
    arena = Arena()
    with pytest.raises(ValueError):
        step_motion(Pose(10, 10), ("teleport",), 0.5, arena)
    with pytest.raises(ValueError):
        step_motion(Pose(10, 10), ("forward",), -0.1, arena)


# -- collision ---------------------------------------------------------------


def test_wall_clamps_motion_with_contact():
    arena = Arena(width=110.0, height=140.0)
    body = RobotBody()
    pose, contact = step_motion(Pose(100, 70, 0.0), ("forward",), 1.0, arena, body)
    assert contact
    assert pose.x == pytest.approx(arena.width - body.radius, abs=1e-3)


def test_no_tunnelling_through_a_thin_obstacle():
    # a 30 cm step toward a robot body 5 cm ahead must stop at contact
    arena = Arena()
    body = RobotBody()
    obstacle = (15.0, 10.0, body.radius)
    pose, contact = step_motion(Pose(10, 10, 0.0), ("forward",), 1.0, arena,
                                body, obstacles=[obstacle])
    assert contact
    assert pose.x == pytest.approx(15.0 - 2 * body.radius, abs=1e-3)
    assert pose.x < 15.0


def test_barrier_blocks_crossing():
    bar = Barrier(0, 70, 110, 70)
    arena = Arena(barriers=[bar])
    body = RobotBody()
    pose, contact = step_motion(Pose(55, 60, math.pi / 2), ("forward",), 1.0,
                                arena, body)
    assert contact
    assert pose.y < 70.0 - body.radius + 1e-6


def test_motion_away_from_touching_obstacle_is_legal():
    # already in contact but moving away: the sweep must not pin the robot
    arena = Arena()
    body = RobotBody()
    obstacle = (13.0, 10.0, body.radius)
    pose, contact = step_motion(Pose(10, 10, math.pi), ("forward", 5.0), 1.0,
                                arena, body, obstacles=[obstacle])
    assert pose.x == pytest.approx(5.0)
    assert not contact


@given(st.floats(min_value=3.0, max_value=107.0),
       st.floats(min_value=3.0, max_value=137.0),
       st.floats(min_value=0.0, max_value=2 * math.pi))
def test_sweep_never_exits_the_arena(x, y, heading):
    arena = Arena()
    body = RobotBody()
    pose, _ = step_motion(Pose(x, y, heading), ("forward",), 1.0, arena, body)
    assert body.radius - 1e-6 <= pose.x <= arena.width - body.radius + 1e-6
    assert body.radius - 1e-6 <= pose.y <= arena.height - body.radius + 1e-6


def test_sweep_move_direct_call():
    arena = Arena()
    x, y, contact = sweep_move(10, 10, 20, 0, 1.5, arena)
    assert (x, y, contact) == (30, 10, False)


# -- signal visibility -------------------------------------------------------


def test_signal_requires_range():
    arena = Arena()
    assert signal_visible((10, 10), (20, 10), arena)
    assert not signal_visible((10, 10), (23, 10), arena)  # beyond 12.5 cm


def test_signal_blocked_by_barrier():
    arena = Arena(barriers=[Barrier(15, 0, 15, 140)])
    assert not signal_visible((10, 10), (20, 10), arena)


def test_signal_blocked_by_robot_body():
    arena = Arena()
    blocker = (7, 15.0, 10.0, 1.5)
    assert not signal_visible((10, 10), (20, 10), arena, robots=[blocker])
    # the endpoints' own bodies are excluded from occlusion
    assert signal_visible((10, 10), (20, 10), arena, robots=[blocker],
                          exclude_ids=(7,))


def test_signal_range_is_configurable():
    arena = Arena()
    assert signal_visible((10, 10), (30, 10), arena, signal_range=25.0)


# -- random walk -------------------------------------------------------------


def test_contact_forces_a_turn():
    rng = random.Random(3)
    for _ in range(50):
        cmd = random_walk_policy(Pose(10, 10), rng, contact=True)
        assert cmd[0] == "rotate"
        assert math.pi / 2 <= cmd[1] <= 3 * math.pi / 2


def test_walk_is_mostly_forward():
    rng = random.Random(5)
    kinds = [random_walk_policy(Pose(10, 10), rng, False)[0] for _ in range(2000)]
    forward_frac = kinds.count("forward") / len(kinds)
    assert 0.85 < forward_frac < 0.95


def test_walk_is_deterministic_per_seed():
    a = random.Random(11)
    b = random.Random(11)
    for _ in range(200):
        assert random_walk_policy(Pose(5, 5), a, False) == \
            random_walk_policy(Pose(5, 5), b, False)


@pytest.mark.parametrize("seed", [1, 7, 42])
def test_random_walk_covers_most_of_the_arena(seed):
    # 10^4 steps of the exploration walk should visit over 80% of the
    # 10 cm x 10 cm occupancy cells
    arena = Arena()
    body = RobotBody()
    pose = Pose(55.0, 70.0, 0.0)
    rng = random.Random(seed)
    contact = False
    cells = set()
    for _ in range(10_000):
        cmd = random_walk_policy(pose, rng, contact)
        pose, contact = step_motion(pose, cmd, 0.5, arena, body)
        cells.add((int(pose.x // 10), int(pose.y // 10)))
    total = math.ceil(arena.width / 10) * math.ceil(arena.height / 10)
    assert len(cells) > 0.8 * total

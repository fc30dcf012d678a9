"""2-D arena: geometry, robot poses and motion, barriers, collision and
line-of-sight occlusion for docking signals.

Coordinates are in cm, headings in radians within [0, 2*pi).  Robot bodies are
treated as discs of diameter `side` for collision and occlusion, which keeps
every test rotation-invariant.  Motion uses a swept-disc collision query, so
no obstacle can be tunnelled through regardless of the tick length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

DEFAULT_SIGNAL_RANGE_CM = 12.5  # midpoint of the 10-15 cm reception envelope
MAX_TURN_RATE_RAD_S = math.pi  # rotation in place, always legal
_CONTACT_EPS = 1e-6


def wrap_angle(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    # adding 2*pi to a tiny negative can round back up to exactly 2*pi
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Barrier:
    """A wall segment that blocks single-robot motion and docking signals.

    height_class counts the robot-module heights an organism must span to
    overstep it.
    """

    x1: float
    y1: float
    x2: float
    y2: float
    height_class: int = 1
    passable_by_organism: bool = True


@dataclass
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        self.heading = wrap_angle(self.heading)


@dataclass(frozen=True)
class RobotBody:
    side: float = 3.0   # cm, square footprint modelled as a disc
    speed: float = 30.0  # cm/s when Moving

    @property
    def radius(self) -> float:
        return self.side / 2.0


@dataclass
class Arena:
    width: float = 110.0
    height: float = 140.0
    barriers: list = field(default_factory=list)

    def contains(self, x: float, y: float, margin: float = 0.0) -> bool:
        return margin <= x <= self.width - margin and margin <= y <= self.height - margin


def point_segment_distance(px, py, x1, y1, x2, y2) -> float:
    dx = x2 - x1
    dy = y2 - y1
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * dx + (py - y1) * dy) / denom
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segments_intersect(a1, a2, b1, b2) -> bool:
    d1 = _orient(*b1, *b2, *a1)
    d2 = _orient(*b1, *b2, *a2)
    d3 = _orient(*a1, *a2, *b1)
    d4 = _orient(*a1, *a2, *b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # collinear touching counts as intersecting
    def on_seg(px, py, qx, qy, rx, ry):
        return min(px, qx) <= rx <= max(px, qx) and min(py, qy) <= ry <= max(py, qy)
    if d1 == 0 and on_seg(*b1, *b2, *a1):
        return True
    if d2 == 0 and on_seg(*b1, *b2, *a2):
        return True
    if d3 == 0 and on_seg(*a1, *a2, *b1):
        return True
    if d4 == 0 and on_seg(*a1, *a2, *b2):
        return True
    return False


def _sweep_circle(x, y, dx, dy, ox, oy, radius, t_max):
    """Earliest t in [0, t_max] at which a point moving along (dx, dy) from
    (x, y) comes within `radius` of (ox, oy); None if it never does."""
    px = ox - x
    py = oy - y
    a = dx * dx + dy * dy
    if a == 0.0:
        return None
    proj = (px * dx + py * dy) / a
    if proj <= 0.0:
        return None
    c = px * px + py * py - radius * radius
    if c <= 0.0:
        return 0.0
    disc = proj * proj - c / a
    if disc < 0.0:
        return None
    t = proj - math.sqrt(disc)
    if 0.0 <= t <= t_max:
        return t
    return None


def _sweep_barrier(x, y, dx, dy, bar: Barrier, radius, t_max):
    """Earliest t at which the moving disc touches the barrier segment."""
    # coarse reject: closest approach of the whole move
    ex, ey = x + dx * t_max, y + dy * t_max
    if (point_segment_distance(x, y, bar.x1, bar.y1, bar.x2, bar.y2) > radius
            and point_segment_distance(ex, ey, bar.x1, bar.y1, bar.x2, bar.y2) > radius
            and not segments_intersect((x, y), (ex, ey), (bar.x1, bar.y1), (bar.x2, bar.y2))):
        # the swept path could still graze the segment sideways; sample midpoint
        mx, my = x + dx * t_max * 0.5, y + dy * t_max * 0.5
        if point_segment_distance(mx, my, bar.x1, bar.y1, bar.x2, bar.y2) > radius:
            return None
    lo, hi = 0.0, t_max

    def dist(t):
        return point_segment_distance(x + dx * t, y + dy * t,
                                      bar.x1, bar.y1, bar.x2, bar.y2)

    if dist(0.0) <= radius:
        return 0.0
    # find some colliding t by scanning, then bisect to the first crossing
    hit = None
    steps = 16
    for i in range(1, steps + 1):
        t = t_max * i / steps
        if dist(t) <= radius:
            hit = t
            lo = t_max * (i - 1) / steps
            break
    if hit is None:
        return None
    hi = hit
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        if dist(mid) <= radius:
            hi = mid
        else:
            lo = mid
    return hi


def sweep_move(x, y, dx, dy, radius, arena: Arena, obstacles=()):
    """Move a disc by (dx, dy), stopping at the first contact with a wall,
    barrier, or obstacle disc (ox, oy, oradius).  Returns (x, y, contact)."""
    t = 1.0
    contact = False
    if dx > 0:
        tw = (arena.width - radius - x) / dx
        if tw < t:
            t, contact = max(0.0, tw), True
    elif dx < 0:
        tw = (radius - x) / dx
        if tw < t:
            t, contact = max(0.0, tw), True
    if dy > 0:
        tw = (arena.height - radius - y) / dy
        if tw < t:
            t, contact = max(0.0, tw), True
    elif dy < 0:
        tw = (radius - y) / dy
        if tw < t:
            t, contact = max(0.0, tw), True
    for ox, oy, orad in obstacles:
        th = _sweep_circle(x, y, dx, dy, ox, oy, radius + orad, t)
        if th is not None and th < t:
            t, contact = th, True
    for bar in arena.barriers:
        th = _sweep_barrier(x, y, dx, dy, bar, radius, t)
        if th is not None and th < t:
            t, contact = th, True
    if contact:
        t = max(0.0, t - _CONTACT_EPS)
    return x + dx * t, y + dy * t, contact


def step_motion(pose: Pose, command, dt_seconds: float, arena: Arena,
                body: RobotBody = RobotBody(), obstacles=()):
    """Kinematic update for one command over dt_seconds.

    command is one of ("forward",), ("forward", max_dist), ("rotate",
    delta_rad), ("stop",).  A forward distance cap lets a robot pull up at a
    target instead of overshooting by a full step.  Blocked motion yields the
    clamped pose plus a contact flag; rotation in place is always legal.
    Obstacles are (x, y, radius) discs.
    """
    if dt_seconds < 0:
        raise ValueError("dt must be non-negative")
    kind = command[0]
    if dt_seconds == 0.0 or kind == "stop":
        return Pose(pose.x, pose.y, pose.heading), False
    if kind == "rotate":
        max_turn = MAX_TURN_RATE_RAD_S * dt_seconds
        delta = max(-max_turn, min(max_turn, command[1]))
        return Pose(pose.x, pose.y, wrap_angle(pose.heading + delta)), False
    if kind != "forward":
        raise ValueError(f"unknown command: {command!r}")
    dist = body.speed * dt_seconds
    if len(command) > 1:
        dist = max(0.0, min(dist, command[1]))
    dx = math.cos(pose.heading) * dist
    dy = math.sin(pose.heading) * dist
    nx, ny, contact = sweep_move(pose.x, pose.y, dx, dy, body.radius, arena, obstacles)
    return Pose(nx, ny, pose.heading), contact


def signal_visible(src, dst, arena: Arena, robots=(), exclude_ids=(),
                   signal_range: float = DEFAULT_SIGNAL_RANGE_CM) -> bool:
    """True iff dst can receive an IR signal emitted at src.

    Reception requires Euclidean distance within range and a sight line that
    crosses no barrier and no robot body other than the endpoints' owners.
    robots are (robot_id, x, y, radius) tuples.
    """
    sx, sy = src
    dx_, dy_ = dst
    if math.hypot(dx_ - sx, dy_ - sy) > signal_range:
        return False
    for bar in arena.barriers:
        if segments_intersect((sx, sy), (dx_, dy_), (bar.x1, bar.y1), (bar.x2, bar.y2)):
            return False
    for rid, rx, ry, rrad in robots:
        if rid in exclude_ids:
            continue
        if point_segment_distance(rx, ry, sx, sy, dx_, dy_) < rrad:
            return False
    return True


def random_walk_policy(pose: Pose, rng, contact: bool = False,
                       p_forward: float = 0.9):
    """Default exploration behavior: mostly forward, occasional uniform turns.

    Deterministic given the robot's own seeded stream.  A contact on the
    previous step forces a turn (the unstick rule).
    """
    if contact:
        return ("rotate", rng.uniform(math.pi / 2, 3 * math.pi / 2))
    if rng.random() < p_forward:
        return ("forward",)
    return ("rotate", rng.uniform(-math.pi, math.pi))

"""Foraging strategies and the swarm-efficiency metric that scores them.

The efficiency ledger partitions every robot's elapsed time into exactly one
of three bins per tick (task / recharging / dead); seeking and waiting count
as recharging overhead, and dead time denominates a robot's efficiency
without adding useful work.

Policies are deterministic functions of (robot state, homeostasis decision,
the robot's own rng stream).  They must honor Critical and StandBy behavior;
everything else is strategy-specific:

* solo    - work until the priority rule fires, chase the nearest free-slot
            signal, recharge to Full.
* hand    - fixed-threshold seeking, no queue discipline, recharge to Full.
* bio     - threshold-response seeking (probability rises with the discharge
            priority), a second waiting line behind the slots with
            position-ordered admission, and the collective instinct of
            leaving at Satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arena import wrap_angle
from .homeostasis import Action, EnergyKind

STATION_VISIBLE_CM = 15.0   # distance at which the physical wall station is noticed
PERIMETER_INSET_CM = 2.5
DEFAULT_P_FORWARD = 0.9
DEFAULT_SEEK_EXPONENT = 2.0


# ---------------------------------------------------------------------------
# efficiency metric


@dataclass
class LedgerEntry:
    t_task: float = 0.0
    t_recharging: float = 0.0
    t_dead: float = 0.0

    @property
    def elapsed(self) -> float:
        return self.t_task + self.t_recharging + self.t_dead

    @property
    def defined(self) -> bool:
        return self.t_task + self.t_recharging > 0


TASK_BIN, RECHARGING_BIN, DEAD_BIN = 0, 1, 2


class EfficiencyLedger:
    """Per-robot tick counters; counting ticks keeps the partition exact."""

    def __init__(self, robot_ids, dt_minutes: float):
        self.dt_minutes = dt_minutes
        self.counts = {rid: [0, 0, 0] for rid in robot_ids}

    def add(self, rid, bin_index: int) -> None:
        self.counts[rid][bin_index] += 1

    def ticks(self, rid) -> int:
        return sum(self.counts[rid])

    def entry(self, rid) -> LedgerEntry:
        c = self.counts[rid]
        return LedgerEntry(c[0] * self.dt_minutes, c[1] * self.dt_minutes,
                           c[2] * self.dt_minutes)

    def entries(self):
        return {rid: self.entry(rid) for rid in self.counts}


def efficiency(entry: LedgerEntry) -> float:
    """Phi = t_task / (t_recharging + t_task), with dead time folded into the
    recharging bin.  An empty ledger is undefined and reported as 0 (check
    entry.defined)."""
    denom = entry.t_task + entry.t_recharging + entry.t_dead
    if denom <= 0:
        return 0.0
    return entry.t_task / denom


def swarm_efficiency(entries) -> float:
    """Mean per-robot efficiency over the swarm."""
    vals = [efficiency(e) for e in entries]
    return sum(vals) / len(vals) if vals else 0.0


# ---------------------------------------------------------------------------
# navigation helpers


def _heading_error(pose, tx, ty) -> float:
    want = math.atan2(ty - pose.y, tx - pose.x)
    err = wrap_angle(want - pose.heading)
    return err if err <= math.pi else err - 2 * math.pi


def steer_to(pose, tx, ty, align_tol: float = 0.35):
    """Rotate toward the target until roughly aligned, then drive, pulling
    up at the target rather than overshooting by a full step."""
    err = _heading_error(pose, tx, ty)
    if abs(err) > align_tol:
        return ("rotate", err)
    return ("forward", math.hypot(tx - pose.x, ty - pose.y))


def nav_step(robot, tx, ty, align_tol: float = 0.35):
    """Target-directed navigation with obstacle recovery.

    On contact the robot turns a random amount and sidesteps for a few
    ticks before re-steering, so it works its way around blockers instead
    of driving back into them."""
    ps = robot.ps
    if robot.contact:
        ps["detour"] = 3
        return ("rotate", robot.rng.uniform(-math.pi / 2, math.pi / 2))
    detour = ps.get("detour", 0)
    if detour > 0:
        ps["detour"] = detour - 1
        return ("forward", 6.0)
    return steer_to(robot.pose, tx, ty, align_tol)


def perimeter_corners(arena, inset: float = PERIMETER_INSET_CM):
    w, h, m = arena.width, arena.height, inset
    return ((m, m), (m, h - m), (w - m, h - m), (w - m, m))


def _nearest_corner_index(pose, corners) -> int:
    return min(range(4), key=lambda i: (pose.x - corners[i][0]) ** 2
               + (pose.y - corners[i][1]) ** 2)


def perimeter_step(robot, arena):
    """Follow the arena perimeter ring; stations sit on walls, so a seeker
    that circles the ring will eventually pass within signal range.

    A barrier can cut the ring, so a seeker that stops making progress
    toward its corner reverses direction and sweeps the reachable stretch
    back and forth instead."""
    ps = robot.ps
    corners = perimeter_corners(arena)
    wp = ps.get("wp")
    if wp is None:
        wp = (_nearest_corner_index(robot.pose, corners) + 1) % 4
        ps["wp"] = wp
        ps["wp_dir"] = 1
    direction = ps.get("wp_dir", 1)
    pos = (robot.pose.x, robot.pose.y)
    anchor = ps.get("stall_pos")
    if anchor is None or math.hypot(pos[0] - anchor[0], pos[1] - anchor[1]) > 2.0:
        ps["stall_pos"] = pos
        ps["stall_ticks"] = 0
    else:
        ps["stall_ticks"] = ps.get("stall_ticks", 0) + 1
    if ps["stall_ticks"] > 10:
        direction = -direction
        ps["wp_dir"] = direction
        wp = (wp + direction) % 4
        ps["wp"] = wp
        ps["stall_pos"] = pos
        ps["stall_ticks"] = 0
    tx, ty = corners[wp]
    if math.hypot(robot.pose.x - tx, robot.pose.y - ty) < 4.0:
        wp = (wp + direction) % 4
        ps["wp"] = wp
        tx, ty = corners[wp]
    if robot.contact:
        # wedged against a wall: square up on the waypoint exactly, since a
        # loosely aligned heading can keep grazing the wall forever; if that
        # is already the heading, the blocker is another body, so detour
        err = _heading_error(robot.pose, tx, ty)
        if abs(err) > 0.05:
            return ("rotate", err)
        ps["detour"] = 3
        return ("rotate", robot.rng.uniform(-math.pi / 2, math.pi / 2))
    detour = ps.get("detour", 0)
    if detour > 0:
        ps["detour"] = detour - 1
        return ("forward", 6.0)
    return steer_to(robot.pose, tx, ty)


# ---------------------------------------------------------------------------
# policies


class Strategy:
    """Base policy: random-walk task, signal-chasing seek, perimeter search.

    Subclasses tune when to seek, whether to queue, and when to leave the
    charger.  Policy scratch state lives in robot.ps; the simulation applies
    returned intents (motion / dock / queue operations)."""

    name = "base"
    collective_instinct = False

    def __init__(self, task_priority: float = 0.1,
                 p_forward: float = DEFAULT_P_FORWARD):
        self.task_priority = task_priority
        self.p_forward = p_forward

    # -- seeking trigger ----------------------------------------------------

    def wants_to_seek(self, robot, decision, state) -> bool:
        return decision is Action.SEEK_DOCK

    def uses_waiting_line(self) -> bool:
        return False

    # -- per-tick policy ----------------------------------------------------

    def step(self, robot, world, decision, state):
        """Returns an intent: ("cmd", command) | ("dock", slot) |
        ("join_wait", station) | ("idle",)."""
        mode = robot.mode
        if mode == "task":
            if self.wants_to_seek(robot, decision, state):
                robot.mode = "seek"
                robot.ps.pop("wp", None)
                robot.ps.pop("target_slot", None)
                return self._seek(robot, world)
            from .arena import random_walk_policy
            return ("cmd", random_walk_policy(robot.pose, robot.rng,
                                              robot.contact, self.p_forward))
        if mode == "seek":
            return self._seek(robot, world)
        if mode == "wait":
            return self._wait(robot, world)
        return ("idle",)

    # -- seek behavior ------------------------------------------------------

    def _seek(self, robot, world):
        ps = robot.ps
        slot = ps.get("target_slot")
        if slot is not None and slot.occupant is not None:
            ps.pop("target_slot", None)
            ps.pop("dock_phase", None)
            slot = None
        if slot is None:
            slot = self._acquire_target(robot, world)
            if slot is not None:
                ps["target_slot"] = slot
                ps["dock_phase"] = "goto"
        if slot is not None:
            return self._approach(robot, world, slot)
        if self.uses_waiting_line():
            station = world.station_near(robot, STATION_VISIBLE_CM)
            if station is not None:
                return ("join_wait", station)
        return self._search(robot, world)

    def _acquire_target(self, robot, world):
        signals = world.visible_free_slots(robot)
        if not signals:
            return None
        px, py = robot.pose.x, robot.pose.y
        return min(signals, key=lambda s: (px - s.anchor[0]) ** 2
                   + (py - s.anchor[1]) ** 2)

    def _search(self, robot, world):
        return ("cmd", perimeter_step(robot, world.arena))

    def _approach(self, robot, world, slot):
        ps = robot.ps
        side = robot.body.side
        ax, ay = slot.anchor
        out = wrap_angle(slot.approach_heading + math.pi)
        sx = ax + math.cos(out) * (side + 0.5)
        sy = ay + math.sin(out) * (side + 0.5)
        phase = ps.get("dock_phase", "goto")
        if phase == "goto":
            if math.hypot(robot.pose.x - sx, robot.pose.y - sy) < 1.0:
                ps["dock_phase"] = "final"
                ps.pop("detour", None)
                return self._approach(robot, world, slot)
            return ("cmd", nav_step(robot, sx, sy, align_tol=0.2))
        # final: square up to the wall, drive in, latch on proximity
        err = wrap_angle(slot.approach_heading - robot.pose.heading)
        err = err if err <= math.pi else err - 2 * math.pi
        if abs(err) > 0.1:
            return ("cmd", ("rotate", err))
        if math.hypot(robot.pose.x - ax, robot.pose.y - ay) <= robot.body.radius + 0.8:
            return ("dock", slot)
        if robot.contact:
            # blocked short of the contacts: re-approach
            ps["dock_phase"] = "goto"
            return ("cmd", ("rotate", robot.rng.uniform(-math.pi / 2, math.pi / 2)))
        return ("cmd", ("forward", math.hypot(robot.pose.x - ax, robot.pose.y - ay)))

    def _wait(self, robot, world):
        spot = robot.ps.get("wait_spot")
        if spot is None:
            return ("idle",)
        tx, ty = spot
        dist = math.hypot(robot.pose.x - tx, robot.pose.y - ty)
        # park loosely: waiting must be cheap, so settle for being near the
        # spot, or against the crowd around it, rather than burning charge
        # shuffling into an exact position
        if dist < 3.0 or (robot.contact and dist < 10.0):
            return ("idle",)
        return ("cmd", nav_step(robot, tx, ty, align_tol=0.3))

    # -- charger exit -------------------------------------------------------

    def should_leave_dock(self, decision) -> bool:
        return decision is Action.LEAVE_DOCK


class SoloGreedyStrategy(Strategy):
    """Work until the priority rule fires, gradient-approach the nearest
    received free-slot signal, recharge to Full, resume."""

    name = "solo"
    collective_instinct = False


class HandCodedStrategy(Strategy):
    """Fixed-threshold seeking at the ideal-seek voltage, no queue
    discipline, recharge always to Full.  With a single robot this reduces
    to the solo behavior."""

    name = "hand-coded"
    collective_instinct = False

    def __init__(self, seek_level: float = 0.1, **kw):
        # seek_level 0.1 corresponds to the 3.65 V ideal via the priority map
        super().__init__(task_priority=seek_level, **kw)

    def wants_to_seek(self, robot, decision, state) -> bool:
        if state.kind is EnergyKind.CRITICAL:
            return True
        if state.kind is EnergyKind.DISCHARGED:
            return state.level > self.task_priority
        return False

    def _search(self, robot, world):
        # no queue discipline: mill around the station when it is in sight
        station = world.station_near(robot, STATION_VISIBLE_CM)
        if station is not None:
            ps = robot.ps
            pick = ps.get("crowd_ticks", 0)
            if pick <= 0:
                slot = station.slots[robot.rng.randrange(len(station.slots))]
                ax, ay = slot.anchor
                out = wrap_angle(slot.approach_heading + math.pi)
                ps["crowd_target"] = (ax + math.cos(out) * (robot.body.side + 0.5),
                                      ay + math.sin(out) * (robot.body.side + 0.5))
                ps["crowd_ticks"] = 6
            ps["crowd_ticks"] = ps.get("crowd_ticks", 1) - 1
            tx, ty = ps["crowd_target"]
            if robot.contact:
                return ("cmd", ("rotate", robot.rng.uniform(-math.pi, math.pi)))
            return ("cmd", steer_to(robot.pose, tx, ty))
        return super()._search(robot, world)


class BioInspiredStrategy(Strategy):
    """Threshold-response seeking with the two-line queue and collective
    instinct: the seek probability per tick is the discharge priority raised
    to a response exponent, waiting robots park one body length behind the
    slots and are admitted in arrival order, and charging stops at Satisfied
    to free the slot."""

    name = "bio-inspired"
    collective_instinct = True

    def __init__(self, seek_exponent: float = DEFAULT_SEEK_EXPONENT, **kw):
        super().__init__(**kw)
        self.seek_exponent = seek_exponent

    def wants_to_seek(self, robot, decision, state) -> bool:
        if state.kind is EnergyKind.CRITICAL:
            return True
        if state.kind is EnergyKind.DISCHARGED:
            return robot.rng.random() < state.level ** self.seek_exponent
        return False

    def uses_waiting_line(self) -> bool:
        return True


STRATEGIES = {
    "solo": SoloGreedyStrategy,
    "hand-coded": HandCodedStrategy,
    "bio-inspired": BioInspiredStrategy,
}


def make_strategy(name: str, **kw) -> Strategy:
    try:
        return STRATEGIES[name](**kw)
    except KeyError:
        raise ValueError(f"unknown strategy: {name!r}") from None

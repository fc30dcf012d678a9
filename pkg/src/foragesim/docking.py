"""Docking stations: free-slot broadcasting, the docking procedure and slot
occupancy.  Contention is resolved by the simulation's deterministic tick
order (lower robot id docks first)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .arena import wrap_angle

SUPPLY_VOLTAGE = 5.0
DEFAULT_DOCKING_LATENCY_S = 2.0
DEFAULT_UNDOCK_LATENCY_S = 1.0
DEFAULT_ALIGN_TOLERANCE_DEG = 15.0


class DockResult(Enum):
    DOCKED = "Docked"
    SLOT_TAKEN = "SlotTaken"
    NOT_ALIGNED = "NotAligned"


@dataclass
class Slot:
    """One charge point on the station wall.

    approach_heading is the direction of travel that drives a robot onto the
    contacts; a docked robot's body occludes the slot's signal.
    """

    id: int
    anchor: tuple  # (x, y) on the wall
    approach_heading: float
    width: float
    occupant: int | None = None
    reserved_by: int | None = None

    @property
    def free(self) -> bool:
        return self.occupant is None


@dataclass
class DockingStation:
    wall: tuple  # ((x1, y1), (x2, y2))
    slots: list
    supply_voltage: float = SUPPLY_VOLTAGE
    waiting: list = field(default_factory=list)  # robot ids, arrival order


def broadcast(slot: Slot):
    """The "I'm free slot" signal, coded numerically; silent while occupied.
    Reception is governed by arena line-of-sight."""
    if slot.occupant is not None:
        return None
    return (slot.id, slot.anchor)


def _angle_diff(a: float, b: float) -> float:
    d = wrap_angle(a - b)
    return d if d <= math.pi else 2 * math.pi - d


def attempt_dock(robot, slot: Slot, body_side: float = 3.0,
                 align_tolerance_deg: float = DEFAULT_ALIGN_TOLERANCE_DEG) -> DockResult:
    """Try to latch `robot` (anything with .id and .pose) onto `slot`.

    Requires contact distance and a heading within tolerance of the approach
    direction.  On success the slot becomes Occupied; the caller starts the
    docking latency before the charging flag flips.
    """
    if slot.occupant is not None:
        return DockResult.SLOT_TAKEN
    ax, ay = slot.anchor
    lateral = math.hypot(robot.pose.x - ax, robot.pose.y - ay)
    if lateral > body_side * 0.75:
        return DockResult.NOT_ALIGNED
    if _angle_diff(robot.pose.heading, slot.approach_heading) > math.radians(align_tolerance_deg):
        return DockResult.NOT_ALIGNED
    slot.occupant = robot.id
    slot.reserved_by = None
    return DockResult.DOCKED


def undock(robot, slot: Slot, body_side: float = 3.0):
    """Release the slot and move the robot one body length off the wall.

    Undocking a robot that does not occupy the slot is a contract violation.
    Returns the robot's new (x, y)."""
    if slot.occupant != robot.id:
        raise ValueError(f"robot {robot.id} does not occupy slot {slot.id}")
    slot.occupant = None
    ax, ay = slot.anchor
    away = wrap_angle(slot.approach_heading + math.pi)
    return (ax + math.cos(away) * body_side * 1.5,
            ay + math.sin(away) * body_side * 1.5)


def make_station(wall_from, wall_to, n_slots: int, body_side: float = 3.0,
                 slot_margin: float = 1.0, id_base: int = 0,
                 interior_point=(55.0, 70.0)) -> DockingStation:
    """Build a station with evenly spaced slots along a wall segment.

    Slot width is one robot body plus a margin; the approach heading points
    from the arena interior into the wall."""
    (x1, y1), (x2, y2) = wall_from, wall_to
    length = math.hypot(x2 - x1, y2 - y1)
    width = body_side + slot_margin
    if n_slots * width > length + 1e-9:
        raise ValueError("wall segment too short for the requested slots")
    # wall normal pointing away from the interior = approach direction
    nx, ny = -(y2 - y1) / length, (x2 - x1) / length
    mx, my = (x1 + x2) / 2.0, (y1 + y2) / 2.0
    ix, iy = interior_point
    if (ix - mx) * nx + (iy - my) * ny > 0:
        nx, ny = -nx, -ny
    approach = wrap_angle(math.atan2(ny, nx))
    slots = []
    for i in range(n_slots):
        frac = (i + 0.5) / n_slots
        ax = x1 + (x2 - x1) * frac
        ay = y1 + (y2 - y1) * frac
        slots.append(Slot(id=id_base + i, anchor=(ax, ay),
                          approach_heading=approach, width=width))
    return DockingStation(wall=(wall_from, wall_to), slots=slots)

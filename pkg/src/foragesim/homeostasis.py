"""Energy-homeostasis classification and the task-vs-recharge decision rule.

Pure functions over (voltage, charging) with configurable thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class EnergyKind(Enum):
    STAND_BY = "StandBy"
    CRITICAL = "Critical"
    DISCHARGED = "Discharged"
    NORMAL = "Normal"
    SATISFIED = "Satisfied"
    FULL = "Full"


@dataclass(frozen=True)
class EnergyState:
    kind: EnergyKind
    level: float = 0.0  # degree of discharging, only meaningful for DISCHARGED


class Action(Enum):
    CONTINUE_TASK = "ContinueTask"
    SEEK_DOCK = "SeekDock"
    STAND_BY_HALT = "StandByHalt"
    LEAVE_DOCK = "LeaveDock"
    KEEP_CHARGING = "KeepCharging"


@dataclass(frozen=True)
class Thresholds:
    """Voltage thresholds separating the homeostasis states.

    hysteresis is a reserved band width; 0 means memoryless classification.
    critical_window_minutes documents the time a Critical robot has to reach
    a slot before the battery model drains it into StandBy on its own; no
    separate timer is enforced.
    """

    v_standby: float = 3.05
    v_critical: float = 3.2
    v_normal: float = 3.7
    v_satisfied: float = 4.0
    v_full: float = 4.2
    v_ideal_seek: float = 3.65
    hysteresis: float = 0.0
    critical_window_minutes: float = 4.0


DEFAULT_THRESHOLDS = Thresholds()


def classify(v: float, charging: bool, th: Thresholds = DEFAULT_THRESHOLDS) -> EnergyState:
    """Total, deterministic classification of a voltage reading.

    Half-open intervals: StandBy below v_standby, Critical up to v_critical,
    Discharged (graded) up to v_normal.  Above v_normal, the charging context
    splits Satisfied/Full from Normal.
    """
    if not 0.0 <= v <= 5.0:
        raise ValueError(f"voltage out of range: {v}")
    if v < th.v_standby:
        return EnergyState(EnergyKind.STAND_BY)
    if v < th.v_critical:
        return EnergyState(EnergyKind.CRITICAL)
    if v < th.v_normal:
        return EnergyState(EnergyKind.DISCHARGED, level=discharge_priority(v, th))
    if charging and v >= th.v_full:
        return EnergyState(EnergyKind.FULL)
    if charging and v >= th.v_satisfied:
        return EnergyState(EnergyKind.SATISFIED)
    return EnergyState(EnergyKind.NORMAL)


def discharge_priority(v: float, th: Thresholds = DEFAULT_THRESHOLDS) -> float:
    """Priority of looking for energy: 0 at v_normal and above, 1 at v_critical
    and below, linear in between.  Continuous and clamped to [0, 1]."""
    p = (th.v_normal - v) / (th.v_normal - th.v_critical)
    return min(1.0, max(0.0, p))


def decide(state: EnergyState, task_priority: float, collective_instinct: bool) -> Action:
    """Arbitrate between the current task and energy seeking.

    Critical always seeks, independently of the current task.  A Discharged
    robot seeks only when its discharge level strictly exceeds the task
    priority (ties continue the task).  A Satisfied robot with collective
    instinct frees its slot for others.
    """
    if not 0.0 <= task_priority <= 1.0:
        raise ValueError(f"task_priority out of range: {task_priority}")
    k = state.kind
    if k is EnergyKind.STAND_BY:
        return Action.STAND_BY_HALT
    if k is EnergyKind.CRITICAL:
        return Action.SEEK_DOCK
    if k is EnergyKind.DISCHARGED:
        return Action.SEEK_DOCK if state.level > task_priority else Action.CONTINUE_TASK
    if k is EnergyKind.SATISFIED:
        return Action.LEAVE_DOCK if collective_instinct else Action.KEEP_CHARGING
    if k is EnergyKind.FULL:
        return Action.LEAVE_DOCK
    return Action.CONTINUE_TASK

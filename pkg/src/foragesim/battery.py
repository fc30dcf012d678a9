"""Li-Po battery model: charge/discharge dynamics, open-circuit voltage and ADC readout.

All charge quantities are fractions of capacity in [0, 1]; time is in minutes.
Rates are linear in dt, so stepping is step-size invariant by construction.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace

DEFAULT_CAPACITY_MAH = 250.0

# Activity names and calibrated current draws (mA).  Moving is pinned so that a
# full battery empties in 75 minutes of continuous motion; the rest are
# plausible defaults, all overridable via scenario config.
IDLE = "Idle"
MOVING = "Moving"
ACTUATING = "Actuating"
COMMUNICATING = "Communicating"

DEFAULT_DRAWS_MA = {
    IDLE: 20.0,
    MOVING: 200.0,
    ACTUATING: 400.0,
    COMMUNICATING: 40.0,
}

# ADC readout path: resistive divider 0.55 into an 8-bit ADC referenced at
# 3.0 V, the unique simple choice that maps 4.2 V to count 196.
ADC_DIVIDER = 0.55
ADC_REFERENCE_V = 3.0
ADC_FULL_SCALE = 255

# Default open-circuit voltage anchors (state-of-charge fraction, volts).
# Pins 3.2 V at 5%, 3.65/3.7 V at 20/25%, 4.0 V at 85%, 4.1 V at 95%.
DEFAULT_OCV_ANCHORS = (
    (0.00, 3.00),
    (0.05, 3.20),
    (0.20, 3.65),
    (0.25, 3.70),
    (0.85, 4.00),
    (0.95, 4.10),
    (1.00, 4.20),
)


@dataclass(frozen=True)
class ActivityLoad:
    """A named activity and its battery current draw in mA."""

    activity: str
    current_draw: float

    def __post_init__(self):
        if self.current_draw <= 0:
            raise ValueError("current_draw must be positive")


def default_load(activity: str) -> ActivityLoad:
    return ActivityLoad(activity, DEFAULT_DRAWS_MA[activity])


@dataclass(frozen=True)
class OCVCurve:
    """Piecewise-linear open-circuit voltage curve over state of charge.

    Anchors must be strictly increasing in both coordinates and span
    charge 0 to 1.
    """

    anchors: tuple

    def __post_init__(self):
        a = tuple((float(c), float(v)) for c, v in self.anchors)
        object.__setattr__(self, "anchors", a)
        if len(a) < 2:
            raise ValueError("need at least two anchors")
        if a[0][0] != 0.0 or a[-1][0] != 1.0:
            raise ValueError("anchors must span charge 0..1")
        for (c0, v0), (c1, v1) in zip(a, a[1:]):
            if not (c1 > c0 and v1 > v0):
                raise ValueError("anchors must be strictly increasing in both coordinates")

    def voltage_at(self, charge: float) -> float:
        if not 0.0 <= charge <= 1.0:
            raise ValueError(f"charge out of range: {charge}")
        a = self.anchors
        socs = [p[0] for p in a]
        i = bisect_right(socs, charge) - 1
        if i >= len(a) - 1:
            return a[-1][1]
        c0, v0 = a[i]
        c1, v1 = a[i + 1]
        return v0 + (v1 - v0) * (charge - c0) / (c1 - c0)

    def charge_at(self, volts: float) -> float:
        """Inverse of voltage_at, clamped to the curve's voltage span."""
        a = self.anchors
        if volts <= a[0][1]:
            return a[0][0]
        if volts >= a[-1][1]:
            return a[-1][0]
        for (c0, v0), (c1, v1) in zip(a, a[1:]):
            if volts <= v1:
                return c0 + (c1 - c0) * (volts - v0) / (v1 - v0)
        return a[-1][0]


DEFAULT_OCV = OCVCurve(DEFAULT_OCV_ANCHORS)


@dataclass(frozen=True)
class BatteryState:
    """Charge as a fraction of capacity, plus the charging flag and age."""

    charge: float
    capacity_mah: float = DEFAULT_CAPACITY_MAH
    charging: bool = False
    age_minutes: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.charge <= 1.0:
            raise ValueError(f"charge out of range: {self.charge}")
        if self.capacity_mah <= 0:
            raise ValueError("capacity must be positive")


@dataclass(frozen=True)
class ChargeProfile:
    """Two-phase charging: constant current up to the knee, then a linear taper.

    The CC rate replaces Moving drain one-for-one in time; the taper consumes
    whatever remains of the empty-to-full budget.
    """

    cc_rate_per_min: float = DEFAULT_DRAWS_MA[MOVING] / (60.0 * DEFAULT_CAPACITY_MAH)
    cc_knee: float = 0.85
    full_minutes: float = 90.0

    @property
    def taper_rate_per_min(self) -> float:
        taper_minutes = self.full_minutes - self.cc_knee / self.cc_rate_per_min
        if taper_minutes <= 0:
            raise ValueError("full_minutes too short for the CC phase")
        return (1.0 - self.cc_knee) / taper_minutes


DEFAULT_CHARGE_PROFILE = ChargeProfile()


def voltage_of(charge: float, curve: OCVCurve = DEFAULT_OCV) -> float:
    """Open-circuit voltage for a state of charge in [0, 1]."""
    return curve.voltage_at(charge)


def adc_of_voltage(v: float) -> int:
    """8-bit ADC count seen by the microcontroller for a divider input voltage."""
    if not 0.0 <= v <= 5.0:
        raise ValueError(f"voltage out of range: {v}")
    count = round(v * ADC_DIVIDER / ADC_REFERENCE_V * ADC_FULL_SCALE)
    return max(0, min(ADC_FULL_SCALE, count))


def drained_charge(charge: float, draw_ma: float, capacity_mah: float, dt_minutes: float) -> float:
    """Charge fraction remaining after drawing draw_ma for dt_minutes, floored at 0."""
    return max(0.0, charge - draw_ma * dt_minutes / (60.0 * capacity_mah))


def charged_charge(charge: float, dt_minutes: float,
                   profile: ChargeProfile = DEFAULT_CHARGE_PROFILE) -> float:
    """Charge fraction after dt_minutes on the charger; halts exactly at 1.0."""
    c = charge
    dt = dt_minutes
    if c < profile.cc_knee:
        to_knee = (profile.cc_knee - c) / profile.cc_rate_per_min
        if dt <= to_knee:
            return c + dt * profile.cc_rate_per_min
        c = profile.cc_knee
        dt -= to_knee
    return min(1.0, c + dt * profile.taper_rate_per_min)


def discharge_step(b: BatteryState, load: ActivityLoad, dt_minutes: float) -> BatteryState:
    """Drain the battery under a constant activity load for dt_minutes."""
    if b.charging:
        raise ValueError("cannot discharge a charging battery")
    if dt_minutes < 0:
        raise ValueError("dt must be non-negative")
    return replace(
        b,
        charge=drained_charge(b.charge, load.current_draw, b.capacity_mah, dt_minutes),
        age_minutes=b.age_minutes + dt_minutes,
    )


def charge_step(b: BatteryState, dt_minutes: float,
                profile: ChargeProfile = DEFAULT_CHARGE_PROFILE) -> BatteryState:
    """Charge the battery for dt_minutes; requires the charging flag to be set."""
    if not b.charging:
        raise ValueError("cannot charge: battery is not flagged charging")
    if dt_minutes < 0:
        raise ValueError("dt must be non-negative")
    return replace(
        b,
        charge=charged_charge(b.charge, dt_minutes, profile),
        age_minutes=b.age_minutes + dt_minutes,
    )

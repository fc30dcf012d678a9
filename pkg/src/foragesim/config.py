"""Scenario configuration: a line-oriented key=value format with section
headers (INI grammar via configparser).

Every tunable constant named anywhere in the simulator appears here with its
default, so any run can override it from a file or a --override flag.  The
resolved configuration is written next to each run's outputs.
"""

from __future__ import annotations

import configparser
import io


class ConfigError(ValueError):
    pass


# section -> key -> default (the default's type defines the key's type)
DEFAULTS = {
    "simulation": {
        "scenario": "custom",
        "seed": 1,
        "duration_minutes": 600.0,
        "dt_seconds": 0.5,
        "replications": 1,
    },
    "arena": {
        "width_cm": 110.0,
        "height_cm": 140.0,
        "signal_range_cm": 12.5,
    },
    "robot": {
        "count": 1,
        "side_cm": 3.0,
        "speed_cm_s": 30.0,
        "placement": "uniform",        # uniform | far_side
        "initial_charge": "1.0",       # float or uniform:a:b
    },
    "battery": {
        "capacity_mah": 250.0,
        "ocv_anchors": "0.0:3.0,0.05:3.2,0.2:3.65,0.25:3.7,0.85:4.0,0.95:4.1,1.0:4.2",
        "draw_idle_ma": 20.0,
        "draw_moving_ma": 200.0,
        "draw_actuating_ma": 400.0,
        "draw_communicating_ma": 40.0,
        "charge_full_minutes": 90.0,
        "charge_cc_knee": 0.85,
    },
    "homeostasis": {
        "v_standby": 3.05,
        "v_critical": 3.2,
        "v_normal": 3.7,
        "v_satisfied": 4.0,
        "v_full": 4.2,
        "v_ideal_seek": 3.65,
        "hysteresis": 0.0,
        "critical_window_minutes": 4.0,
        "task_priority": 0.1,
    },
    "docking": {
        "docking_latency_s": 2.0,
        "undock_latency_s": 1.0,
        "reservation_timeout_minutes": 3.0,
        "slot_margin_cm": 1.0,
        "align_tolerance_deg": 15.0,
    },
    "station": {
        "slots": 1,
        "wall": "bottom",              # bottom | top | left | right
        "center_frac": 0.5,
    },
    "barrier": {
        "enabled": False,
        "y_frac": 0.5,
        "height_class": 1,
        "passable_by_organism": True,
    },
    "strategy": {
        "name": "solo",
        "p_forward": 0.9,
        "seek_exponent": 2.0,
        "station_visible_cm": 15.0,
    },
    "genome": {
        "enabled": False,
        "epsilon": 0.5,
        "failure_decay": 0.5,
        "success_increment": 1.0,
        "ema_alpha": 0.5,
        "tier_band_mah": 50.0,
        "max_states": 65536,
        "seek_timeout_minutes": 2.0,
        "exchange_interval_s": 60.0,
        "exchange_cooldown_minutes": 5.0,
    },
    "organism": {
        "enabled": False,
        "docked_idle_discount": 0.5,
        "speed_factor": 0.6,
        "segment_size": 5,
        "crossing_duration_s": 30.0,
        "rally_grace_minutes": 5.0,
        "rally_offset_cm": 8.0,
    },
}


def _coerce(section: str, key: str, raw):
    try:
        default = DEFAULTS[section][key]
    except KeyError:
        raise ConfigError(f"unknown config key: {section}.{key}") from None
    if isinstance(raw, str):
        raw = raw.strip()
    if isinstance(default, bool):
        if isinstance(raw, bool):
            return raw
        if raw.lower() in ("true", "yes", "on", "1"):
            return True
        if raw.lower() in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{section}.{key}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{key}: expected an integer, got {raw!r}") from None
    if isinstance(default, float):
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}") from None
    return str(raw)


class ScenarioConfig:
    """Typed view over the section/key table, with file round-tripping."""

    def __init__(self, values=None):
        self.values = {s: dict(kv) for s, kv in DEFAULTS.items()}
        if values:
            for section, kv in values.items():
                for key, val in kv.items():
                    self.set(section, key, val)

    def get(self, section: str, key: str):
        try:
            return self.values[section][key]
        except KeyError:
            raise ConfigError(f"unknown config key: {section}.{key}") from None

    def set(self, section: str, key: str, value) -> None:
        self.values.setdefault(section, {})
        self.values[section][key] = _coerce(section, key, value)

    def apply_override(self, expr: str) -> None:
        """Apply a CLI override of the form section.key=value."""
        if "=" not in expr or "." not in expr.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {expr!r}")
        path, value = expr.split("=", 1)
        section, key = path.split(".", 1)
        self.set(section.strip(), key.strip(), value)

    def copy(self) -> "ScenarioConfig":
        return ScenarioConfig(self.values)

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        for section in DEFAULTS:
            cp[section] = {k: str(v) for k, v in self.values[section].items()}
        out = io.StringIO()
        cp.write(out)
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"bad config syntax: {exc}") from None
        cfg = cls()
        for section in cp.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section: {section}")
            for key, val in cp[section].items():
                cfg.set(section, key, val)
        return cfg

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def ocv_anchor_pairs(self):
        out = []
        for part in self.get("battery", "ocv_anchors").split(","):
            try:
                c, v = part.split(":")
                out.append((float(c), float(v)))
            except ValueError:
                raise ConfigError(f"bad ocv anchor: {part!r}") from None
        return tuple(out)

    def initial_charge_sampler(self):
        """Returns a function(rng) -> charge fraction."""
        spec = self.get("robot", "initial_charge")
        if spec.startswith("uniform:"):
            try:
                _, a, b = spec.split(":")
                lo, hi = float(a), float(b)
            except ValueError:
                raise ConfigError(f"bad initial_charge: {spec!r}") from None
            if not (0.0 <= lo <= hi <= 1.0):
                raise ConfigError(f"initial_charge range out of [0,1]: {spec!r}")
            return lambda rng: rng.uniform(lo, hi)
        try:
            fixed = float(spec)
        except ValueError:
            raise ConfigError(f"bad initial_charge: {spec!r}") from None
        if not 0.0 <= fixed <= 1.0:
            raise ConfigError(f"initial_charge out of [0,1]: {spec!r}")
        return lambda rng: fixed

    def validate(self) -> None:
        if self.get("robot", "count") < 1:
            raise ConfigError("robot.count must be at least 1")
        if self.get("simulation", "duration_minutes") <= 0:
            raise ConfigError("simulation.duration_minutes must be positive")
        if self.get("simulation", "dt_seconds") <= 0:
            raise ConfigError("simulation.dt_seconds must be positive")
        if self.get("simulation", "replications") < 1:
            raise ConfigError("simulation.replications must be at least 1")
        if self.get("station", "slots") < 0:
            raise ConfigError("station.slots must be non-negative")
        if self.get("station", "wall") not in ("bottom", "top", "left", "right"):
            raise ConfigError("station.wall must be bottom/top/left/right")
        if self.get("robot", "placement") not in ("uniform", "far_side"):
            raise ConfigError("robot.placement must be uniform or far_side")
        from .strategies import STRATEGIES
        if self.get("strategy", "name") not in STRATEGIES:
            raise ConfigError(f"unknown strategy: {self.get('strategy', 'name')!r}")
        if self.get("robot", "placement") == "far_side" and not self.get("barrier", "enabled"):
            raise ConfigError("far_side placement requires an enabled barrier")
        self.ocv_anchor_pairs()
        self.initial_charge_sampler()


def scenario_library():
    """The named scenarios shipped with the simulator.

    solo: one robot, one slot.  bottleneck: ten robots contending for two
    slots.  barrier-swarm: a full-width barrier separates every robot from
    the station; organisms disabled.  barrier-organism: the same layout with
    aggregation and the genome framework enabled."""
    lib = {}
    lib["solo"] = ScenarioConfig({
        "simulation": {"scenario": "solo"},
        "robot": {"count": 1},
        "station": {"slots": 1},
        "strategy": {"name": "solo"},
    })
    lib["bottleneck"] = ScenarioConfig({
        "simulation": {"scenario": "bottleneck", "dt_seconds": 1.0},
        "robot": {"count": 10, "initial_charge": "uniform:0.5:1.0"},
        "station": {"slots": 2},
        "strategy": {"name": "hand-coded"},
    })
    lib["barrier-swarm"] = ScenarioConfig({
        "simulation": {"scenario": "barrier-swarm", "dt_seconds": 1.0},
        "robot": {"count": 6, "placement": "far_side", "initial_charge": "0.55"},
        "station": {"slots": 6},
        "barrier": {"enabled": True},
        "strategy": {"name": "bio-inspired"},
    })
    s4 = ScenarioConfig({
        "simulation": {"scenario": "barrier-organism", "dt_seconds": 1.0},
        "robot": {"count": 6, "placement": "far_side", "initial_charge": "0.55"},
        "station": {"slots": 6},
        "barrier": {"enabled": True},
        "strategy": {"name": "bio-inspired"},
        "genome": {"enabled": True},
        "organism": {"enabled": True},
    })
    lib["barrier-organism"] = s4
    return lib

"""Configuration: grammar, typing, overrides, validation, and the guarantee
that every tunable constant is reachable from a config file."""

import random

import pytest

from foragesim.config import ConfigError, DEFAULTS, ScenarioConfig, scenario_library


# -- typed access and coercion -----------------------------------------------


def test_defaults_are_loaded():
    cfg = ScenarioConfig()
    assert cfg.get("battery", "capacity_mah") == 250.0
    assert cfg.get("robot", "count") == 1
    assert cfg.get("barrier", "enabled") is False


def test_values_coerce_to_the_default_type():
    cfg = ScenarioConfig()
    cfg.set("robot", "count", "12")
    assert cfg.get("robot", "count") == 12
    cfg.set("battery", "capacity_mah", "300")
    assert cfg.get("battery", "capacity_mah") == 300.0
    cfg.set("barrier", "enabled", "yes")
    assert cfg.get("barrier", "enabled") is True
    cfg.set("barrier", "enabled", "off")
    assert cfg.get("barrier", "enabled") is False


def test_bad_coercions_raise():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigError):
        cfg.set("robot", "count", "several")
    with pytest.raises(ConfigError):
        cfg.set("battery", "capacity_mah", "heavy")
    with pytest.raises(ConfigError):
        cfg.set("barrier", "enabled", "maybe")


def test_unknown_keys_and_sections_raise():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigError):
        cfg.get("robot", "mass")
    with pytest.raises(ConfigError):
        cfg.set("physics", "gravity", "9.8")


# -- overrides ---------------------------------------------------------------


def test_override_expression():
    cfg = ScenarioConfig()
    cfg.apply_override("robot.count=4")
    assert cfg.get("robot", "count") == 4
    cfg.apply_override("strategy.name=bio-inspired")
    assert cfg.get("strategy", "name") == "bio-inspired"


def test_bad_override_syntax_raises():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigError):
        cfg.apply_override("robot.count")
    with pytest.raises(ConfigError):
        cfg.apply_override("count=4")


# -- file round-trip ---------------------------------------------------------


def test_text_round_trip_preserves_values():
    cfg = ScenarioConfig()
    cfg.set("robot", "count", 7)
    cfg.set("strategy", "name", "hand-coded")
    back = ScenarioConfig.from_text(cfg.to_text())
    assert back.values == cfg.values


def test_from_text_rejects_unknown_section_and_bad_syntax():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_text("[physics]\ngravity = 9.8\n")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_text("robot.count = 3")


def test_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("[robot]\ncount = 5\n")
    assert ScenarioConfig.from_file(path).get("robot", "count") == 5


def test_copy_is_independent():
    cfg = ScenarioConfig()
    dup = cfg.copy()
    dup.set("robot", "count", 99)
    assert cfg.get("robot", "count") == 1


# -- derived accessors -------------------------------------------------------


def test_ocv_anchor_pairs_parse():
    pairs = ScenarioConfig().ocv_anchor_pairs()
    assert pairs[0] == (0.0, 3.0)
    assert pairs[-1] == (1.0, 4.2)
    cfg = ScenarioConfig()
    cfg.set("battery", "ocv_anchors", "0:3.0,broken")
    with pytest.raises(ConfigError):
        cfg.ocv_anchor_pairs()


def test_initial_charge_fixed_and_uniform():
    cfg = ScenarioConfig()
    assert cfg.initial_charge_sampler()(random.Random(0)) == 1.0
    cfg.set("robot", "initial_charge", "uniform:0.5:1.0")
    rng = random.Random(1)
    draws = [cfg.initial_charge_sampler()(rng) for _ in range(100)]
    assert all(0.5 <= d <= 1.0 for d in draws)
    assert len(set(draws)) > 1


def test_initial_charge_grammar_errors():
    cfg = ScenarioConfig()
    for bad in ("plenty", "uniform:0.5", "uniform:0.9:0.1", "1.5"):
        cfg.values["robot"]["initial_charge"] = bad
        with pytest.raises(ConfigError):
            cfg.initial_charge_sampler()


# -- validation --------------------------------------------------------------


def test_validation_catches_bad_settings():
    checks = [
        ("robot", "count", 0),
        ("simulation", "duration_minutes", -1.0),
        ("simulation", "dt_seconds", 0.0),
        ("simulation", "replications", 0),
        ("station", "slots", -1),
    ]
    for section, key, value in checks:
        cfg = ScenarioConfig()
        cfg.values[section][key] = value
        with pytest.raises(ConfigError):
            cfg.validate()
    cfg = ScenarioConfig()
    cfg.values["station"]["wall"] = "ceiling"
    with pytest.raises(ConfigError):
        cfg.validate()
    cfg = ScenarioConfig()
    cfg.values["robot"]["placement"] = "far_side"  # without a barrier
    with pytest.raises(ConfigError):
        cfg.validate()
    cfg = ScenarioConfig()
    cfg.values["strategy"]["name"] = "psychic"
    with pytest.raises(ConfigError):
        cfg.validate()


def test_default_configuration_is_valid():
    ScenarioConfig().validate()


# -- the scenario library ----------------------------------------------------


def test_library_ships_the_four_scenarios():
    lib = scenario_library()
    assert set(lib) == {"solo", "bottleneck", "barrier-swarm", "barrier-organism"}
    for cfg in lib.values():
        cfg.validate()
    assert lib["solo"].get("robot", "count") == 1
    assert lib["bottleneck"].get("robot", "count") == 10
    assert lib["bottleneck"].get("station", "slots") == 2
    assert lib["barrier-swarm"].get("barrier", "enabled") is True
    assert lib["barrier-swarm"].get("organism", "enabled") is False
    assert lib["barrier-organism"].get("organism", "enabled") is True
    assert lib["barrier-organism"].get("genome", "enabled") is True


# -- completeness: every tunable constant has a config home ------------------


def test_every_design_constant_is_configurable():
    # one entry per tunable constant used by the simulator; this list is the
    # contract that nothing stays hard-coded out of reach of a config file
    required = [
        ("simulation", "duration_minutes"),
        ("simulation", "dt_seconds"),
        ("simulation", "replications"),
        ("arena", "width_cm"),
        ("arena", "height_cm"),
        ("arena", "signal_range_cm"),
        ("robot", "count"),
        ("robot", "side_cm"),
        ("robot", "speed_cm_s"),
        ("robot", "placement"),
        ("robot", "initial_charge"),
        ("battery", "capacity_mah"),
        ("battery", "ocv_anchors"),
        ("battery", "draw_idle_ma"),
        ("battery", "draw_moving_ma"),
        ("battery", "draw_actuating_ma"),
        ("battery", "draw_communicating_ma"),
        ("battery", "charge_full_minutes"),
        ("battery", "charge_cc_knee"),
        ("homeostasis", "v_standby"),
        ("homeostasis", "v_critical"),
        ("homeostasis", "v_normal"),
        ("homeostasis", "v_satisfied"),
        ("homeostasis", "v_full"),
        ("homeostasis", "v_ideal_seek"),
        ("homeostasis", "task_priority"),
        ("docking", "docking_latency_s"),
        ("docking", "undock_latency_s"),
        ("docking", "reservation_timeout_minutes"),
        ("docking", "slot_margin_cm"),
        ("docking", "align_tolerance_deg"),
        ("station", "slots"),
        ("station", "wall"),
        ("barrier", "enabled"),
        ("barrier", "height_class"),
        ("barrier", "passable_by_organism"),
        ("strategy", "name"),
        ("strategy", "p_forward"),
        ("strategy", "seek_exponent"),
        ("genome", "enabled"),
        ("genome", "epsilon"),
        ("genome", "failure_decay"),
        ("genome", "success_increment"),
        ("genome", "ema_alpha"),
        ("genome", "tier_band_mah"),
        ("genome", "seek_timeout_minutes"),
        ("organism", "enabled"),
        ("organism", "segment_size"),
        ("organism", "crossing_duration_s"),
        ("organism", "rally_grace_minutes"),
    ]
    for section, key in required:
        assert key in DEFAULTS.get(section, {}), f"missing {section}.{key}"

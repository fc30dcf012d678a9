"""Deterministic agent-based simulator of collective energy foraging for
swarm microrobots: battery and homeostasis models, a 2D arena with docking
stations, foraging strategies, an evolvable sequence genome, and robot
organisms that cross barriers no single robot can pass."""

from .battery import (ActivityLoad, BatteryState, ChargeProfile, OCVCurve,
                      adc_of_voltage, charge_step, discharge_step, voltage_of)
from .config import ConfigError, ScenarioConfig, scenario_library
from .genome import (Gene, Genome, default_genome, divergence,
                     merge_virtual_genome, select_sequence)
from .harness import build_summary, run, run_once
from .homeostasis import Action, EnergyKind, EnergyState, Thresholds, classify, decide
from .organism import EnergyBus, OrganismGraph, cross_barrier
from .simulation import Simulation
from .strategies import (EfficiencyLedger, LedgerEntry, efficiency,
                         make_strategy, swarm_efficiency)

__all__ = [
    "ActivityLoad", "BatteryState", "ChargeProfile", "OCVCurve",
    "adc_of_voltage", "charge_step", "discharge_step", "voltage_of",
    "ConfigError", "ScenarioConfig", "scenario_library",
    "Gene", "Genome", "default_genome", "divergence",
    "merge_virtual_genome", "select_sequence",
    "build_summary", "run", "run_once",
    "Action", "EnergyKind", "EnergyState", "Thresholds", "classify", "decide",
    "EnergyBus", "OrganismGraph", "cross_barrier",
    "Simulation",
    "EfficiencyLedger", "LedgerEntry", "efficiency", "make_strategy",
    "swarm_efficiency",
]

__version__ = "1.0.0"

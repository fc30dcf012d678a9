"""Experiment harness: runs seeded replications of a scenario and writes the
event log, the run summary and the resolved configuration to disk.

The summary is rebuilt entirely from the event log (mode transitions, dock
and death events, organism and genome events), so a logged run can always be
replayed into the same metrics.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .config import ScenarioConfig
from .simulation import Simulation
from .strategies import LedgerEntry, efficiency, swarm_efficiency

EVENT_HEADER = ("tick", "robot", "event", "value")
LATENCY_BIN_MINUTES = 10.0

_MODE_BINS = {
    "task": "t_task",
    "seek": "t_recharging",
    "wait": "t_recharging",
    "docked": "t_recharging",
    "undock": "t_recharging",
    "rally": "t_recharging",
    "organism": "t_recharging",
    "dead": "t_dead",
}


def write_events_csv(events, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_HEADER)
        writer.writerows(events)


def read_events_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(int(t), int(r), e, v) for t, r, e, v in reader]


def _mode_minutes(events, robot_ids, total_ticks, dt_minutes):
    """Replay mode-transition events into per-robot time bins.

    A robot occupies the mode of its latest transition at or before each
    tick; every tick lands in exactly one bin."""
    transitions = {rid: [] for rid in robot_ids}
    for tick, rid, name, value in events:
        if name == "mode" and rid in transitions:
            transitions[rid].append((tick, value))
    bins = {}
    for rid in robot_ids:
        entry = {"t_task": 0.0, "t_recharging": 0.0, "t_dead": 0.0}
        marks = transitions[rid]
        for i, (tick, mode) in enumerate(marks):
            end = marks[i + 1][0] if i + 1 < len(marks) else total_ticks
            entry[_MODE_BINS[mode]] += (end - tick) * dt_minutes
        bins[rid] = entry
    return bins


def _latency_histogram(latencies, bin_minutes: float = LATENCY_BIN_MINUTES):
    counts = {}
    for lat in latencies:
        key = str(int(lat // bin_minutes) * int(bin_minutes))
        counts[key] = counts.get(key, 0) + 1
    return {"bin_minutes": bin_minutes, "counts": counts}


def build_summary(events, cfg: ScenarioConfig) -> dict:
    dt_minutes = cfg.get("simulation", "dt_seconds") / 60.0
    total_ticks = round(cfg.get("simulation", "duration_minutes") / dt_minutes)
    robot_ids = list(range(cfg.get("robot", "count")))

    bins = _mode_minutes(events, robot_ids, total_ticks, dt_minutes)
    docks = {rid: 0 for rid in robot_ids}
    deaths = {rid: 0 for rid in robot_ids}
    escalations = {rid: 0 for rid in robot_ids}
    latencies = []
    organisms = {"formed": 0, "crossings": 0, "failed_crossings": 0,
                 "snapshots": []}
    divergence = None
    pending_snapshot = None
    for tick, rid, name, value in events:
        if name == "dock":
            docks[rid] += 1
        elif name == "death":
            deaths[rid] = 1
        elif name == "escalate":
            escalations[rid] += 1
        elif name == "delayed_fitness":
            latencies.append(float(value))
        elif name == "organism_form":
            organisms["formed"] += 1
            pending_snapshot = {"tick": tick, "members": int(value)}
        elif name == "organism_edges":
            pending_snapshot["edges"] = value
        elif name == "organism_segments":
            pending_snapshot["bus_segments"] = value
            organisms["snapshots"].append(pending_snapshot)
            pending_snapshot = None
        elif name == "organism_cross":
            organisms["crossings"] += 1
        elif name == "organism_cross_failed":
            organisms["failed_crossings"] += 1
        elif name == "genome_divergence":
            divergence = float(value)

    robots = []
    entries = []
    for rid in robot_ids:
        b = bins[rid]
        entry = LedgerEntry(b["t_task"], b["t_recharging"], b["t_dead"])
        entries.append(entry)
        robots.append({
            "id": rid,
            "efficiency": efficiency(entry),
            "t_task_min": round(entry.t_task, 6),
            "t_recharging_min": round(entry.t_recharging, 6),
            "t_dead_min": round(entry.t_dead, 6),
            "recharges": docks[rid],
            "escalations": escalations[rid],
            "died": bool(deaths[rid]),
        })

    summary = {
        "scenario": cfg.get("simulation", "scenario"),
        "seed": cfg.get("simulation", "seed"),
        "duration_minutes": cfg.get("simulation", "duration_minutes"),
        "robot_count": len(robot_ids),
        "robots": robots,
        "swarm_efficiency": swarm_efficiency(entries),
        "deaths": sum(deaths.values()),
        "organisms": organisms,
        "delayed_fitness_latencies_min": sorted(latencies),
        "delayed_fitness_histogram": _latency_histogram(latencies),
    }
    if divergence is not None:
        summary["genome_divergence"] = divergence
    return summary


def run_once(cfg: ScenarioConfig):
    """One replication: simulate, then rebuild the summary from the log."""
    sim = Simulation(cfg)
    events = sim.run()
    return build_summary(events, cfg), events


def summary_json(summary) -> str:
    return json.dumps(summary, sort_keys=True, indent=2) + "\n"


def _write_replication(cfg, summary, events, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_events_csv(events, out_dir / "events.csv")
    (out_dir / "summary.json").write_text(summary_json(summary))
    (out_dir / "config.resolved").write_text(cfg.to_text())


def run(cfg: ScenarioConfig, out_dir=None):
    """Run the configured number of replications with seeds seed..seed+K-1.

    With one replication the outputs land directly in out_dir; with several,
    each replication gets a seed-<n> subdirectory and the top-level
    summary.json aggregates them in seed order."""
    cfg.validate()
    base_seed = cfg.get("simulation", "seed")
    count = cfg.get("simulation", "replications")
    out_dir = Path(out_dir) if out_dir is not None else None
    summaries = []
    for k in range(count):
        rep_cfg = cfg.copy()
        rep_cfg.set("simulation", "seed", base_seed + k)
        summary, events = run_once(rep_cfg)
        summaries.append(summary)
        if out_dir is not None:
            rep_dir = out_dir if count == 1 else out_dir / f"seed-{base_seed + k}"
            _write_replication(rep_cfg, summary, events, rep_dir)
    if out_dir is not None and count > 1:
        aggregate = {
            "scenario": cfg.get("simulation", "scenario"),
            "replications": summaries,
            "mean_swarm_efficiency": sum(s["swarm_efficiency"] for s in summaries) / count,
            "total_deaths": sum(s["deaths"] for s in summaries),
        }
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "summary.json").write_text(summary_json(aggregate))
    return summaries

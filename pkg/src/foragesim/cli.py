"""Command-line entry point.

Usage:
    foragesim run --scenario solo --seed 1 --replications 20 --out results/ \
        --override simulation.duration_minutes=300
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ScenarioConfig, scenario_library
from .harness import run


def _load_scenario(name_or_path: str) -> ScenarioConfig:
    lib = scenario_library()
    if name_or_path in lib:
        return lib[name_or_path]
    try:
        return ScenarioConfig.from_file(name_or_path)
    except FileNotFoundError:
        raise ConfigError(
            f"{name_or_path!r} is neither a known scenario "
            f"({', '.join(sorted(lib))}) nor a readable config file") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foragesim",
                                     description="Swarm energy-foraging simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario and write metrics")
    p.add_argument("--scenario", required=True,
                   help="named scenario or path to a config file")
    p.add_argument("--seed", type=int, default=None, help="base random seed")
    p.add_argument("--replications", type=int, default=None,
                   help="number of seeded replications (seeds seed..seed+K-1)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--override", action="append", default=[],
                   metavar="SECTION.KEY=VALUE",
                   help="config override; may repeat")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_scenario(args.scenario)
        if args.seed is not None:
            cfg.set("simulation", "seed", args.seed)
        if args.replications is not None:
            cfg.set("simulation", "replications", args.replications)
        for expr in args.override:
            cfg.apply_override(expr)
        summaries = run(cfg, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for s in summaries:
        print(f"seed {s['seed']}: swarm efficiency {s['swarm_efficiency']:.4f}, "
              f"deaths {s['deaths']}")
    if args.out:
        print(f"outputs written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

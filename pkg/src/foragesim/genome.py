"""Genetic behavior framework: genes as weighted state sequences, selection
favoring cheap successful sequences, mutation/recombination, pairwise
exchange, and merging into an organism's virtual genome.

Weights are dual: "success" (incremented on successful recharging, halved on
failure) and "consumed_energy" (an mAh estimate tracked as an exponential
moving average).  Selection walks energy tiers from cheapest upward and only
escalates when everything cheaper has a zero-near success weight.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from enum import Enum

MAX_GENOME_STATES = 2 ** 16

BASIC_GENE_NAMES = ("move", "rotate", "dock in", "dock from", "actuate")

GENOME_FORMAT_VERSION = 1

DEFAULT_EPSILON = 0.5
DEFAULT_FAILURE_DECAY = 0.5
DEFAULT_SUCCESS_INCREMENT = 1.0
DEFAULT_EMA_ALPHA = 0.5
DEFAULT_TIER_BAND_MAH = 50.0


class Opcode(Enum):
    MOVE_STEP = "MoveStep"
    ROTATE_STEP = "RotateStep"
    DOCK_IN_STEP = "DockInStep"
    DOCK_OUT_STEP = "DockOutStep"
    ACTUATE_STEP = "ActuateStep"
    SENSE_STEP = "SenseStep"
    BRANCH_ON_SIGNAL = "BranchOnSignal"


# argument range per opcode, inclusive
ARG_RANGES = {
    Opcode.MOVE_STEP: (0, 255),
    Opcode.ROTATE_STEP: (-180, 180),
    Opcode.DOCK_IN_STEP: (0, 15),
    Opcode.DOCK_OUT_STEP: (0, 15),
    Opcode.ACTUATE_STEP: (0, 255),
    Opcode.SENSE_STEP: (0, 15),
    Opcode.BRANCH_ON_SIGNAL: (0, 63),
}


@dataclass(frozen=True)
class State:
    """One behavioral 'base': an opcode plus a small integer argument."""

    opcode: Opcode
    argument: int = 0

    def __post_init__(self):
        lo, hi = ARG_RANGES[self.opcode]
        if not lo <= self.argument <= hi:
            raise ValueError(f"argument {self.argument} out of range for {self.opcode}")


@dataclass(frozen=True)
class Gene:
    name: str
    states: tuple
    success: float = 1.0
    consumed_energy: float = 0.0  # mAh estimate
    recessive: bool = False

    def __post_init__(self):
        if not self.states:
            raise ValueError("gene needs at least one state")
        if self.success < 0 or self.consumed_energy < 0:
            raise ValueError("weights must be non-negative")


@dataclass
class LogRecord:
    sequence: str
    outcome: str  # "success" | "failure"
    energy_spent: float
    timestamp: float


@dataclass
class Genome:
    """A robot's (or organism's) gene set, bounded at 2^16 states total.

    The five basic genes are always present and are never deleted, renamed or
    made recessive."""

    genes: list
    owner: object = None
    log: list = field(default_factory=list)  # append-only UpdateLog

    def __post_init__(self):
        self.validate()

    def validate(self):
        names = {g.name for g in self.genes if not g.recessive}
        for basic in BASIC_GENE_NAMES:
            if basic not in names:
                raise ValueError(f"basic gene {basic!r} missing or recessive")
        if self.state_count() > MAX_GENOME_STATES:
            raise ValueError("genome exceeds the state cap")

    def state_count(self) -> int:
        return sum(len(g.states) for g in self.genes)

    def gene(self, name: str, recessive: bool = False) -> Gene:
        for g in self.genes:
            if g.name == name and g.recessive == recessive:
                return g
        raise KeyError(name)

    def has_gene(self, name: str, recessive: bool = False) -> bool:
        return any(g.name == name and g.recessive == recessive for g in self.genes)

    def _replace_gene(self, name: str, new: Gene):
        for i, g in enumerate(self.genes):
            if g.name == name and not g.recessive:
                self.genes[i] = new
                return
        raise KeyError(name)


def _gene(name, opcodes, success=1.0, energy=0.0):
    return Gene(name, tuple(State(op) for op in opcodes), success, energy)


def default_genome(owner=None, include_combinations: bool = True) -> Genome:
    """Basic genes plus the cached combination sequences the forager selects
    between: a cheap solo routine and an expensive aggregation routine."""
    genes = [
        _gene("move", [Opcode.MOVE_STEP] * 4, energy=5.0),
        _gene("rotate", [Opcode.ROTATE_STEP] * 2, energy=3.0),
        _gene("dock in", [Opcode.SENSE_STEP, Opcode.MOVE_STEP, Opcode.DOCK_IN_STEP], energy=10.0),
        _gene("dock from", [Opcode.DOCK_OUT_STEP, Opcode.MOVE_STEP], energy=8.0),
        _gene("actuate", [Opcode.ACTUATE_STEP] * 2, energy=60.0),
    ]
    if include_combinations:
        genes.append(_gene(
            "forage solo",
            [Opcode.MOVE_STEP, Opcode.ROTATE_STEP, Opcode.SENSE_STEP,
             Opcode.BRANCH_ON_SIGNAL, Opcode.DOCK_IN_STEP],
            energy=15.0))
        genes.append(_gene(
            "forage aggregate",
            [Opcode.MOVE_STEP, Opcode.DOCK_IN_STEP, Opcode.ACTUATE_STEP,
             Opcode.ACTUATE_STEP, Opcode.DOCK_OUT_STEP],
            energy=110.0))
    return Genome(genes=genes, owner=owner)


def energy_tier(gene: Gene, band_mah: float = DEFAULT_TIER_BAND_MAH) -> int:
    return int(gene.consumed_energy // band_mah)


def select_sequence(genome: Genome, context=None,
                    epsilon: float = DEFAULT_EPSILON,
                    band_mah: float = DEFAULT_TIER_BAND_MAH) -> Gene:
    """Pick the sequence to execute next.

    Candidates are the non-recessive genes (optionally restricted by
    `context`, an iterable of names).  Tiers are walked cheapest-first; a tier
    qualifies when its best success weight is not zero-near.  Zero-near is
    judged relative to the best success among all candidates, which keeps the
    choice invariant under positive scaling of all success weights; ties
    within a tier break by lower consumed energy, then gene name.
    """
    wanted = set(context) if context is not None else None
    candidates = [g for g in genome.genes
                  if not g.recessive and (wanted is None or g.name in wanted)]
    if not candidates:
        raise ValueError("no candidate sequences")
    best_overall = max(g.success for g in candidates)
    threshold = epsilon * best_overall
    tiers = {}
    for g in candidates:
        tiers.setdefault(energy_tier(g, band_mah), []).append(g)
    order = sorted(tiers)
    for tier in order:
        pool = tiers[tier]
        best = min(pool, key=lambda g: (-g.success, g.consumed_energy, g.name))
        if best.success >= threshold and best.success > 0:
            return best
    # every tier is zero-near (e.g. all successes are equal-and-tiny):
    # fall back to the most-escalated option
    pool = tiers[order[-1]]
    return min(pool, key=lambda g: (-g.success, g.consumed_energy, g.name))


def update_on_success(genome: Genome, sequence: str, energy_spent: float,
                      increment: float = DEFAULT_SUCCESS_INCREMENT,
                      ema_alpha: float = DEFAULT_EMA_ALPHA,
                      timestamp: float = 0.0) -> None:
    """Reward a sequence that led to successful recharging: additive success
    bump and an EMA update of the consumed-energy estimate."""
    g = genome.gene(sequence)
    new_energy = g.consumed_energy + ema_alpha * (energy_spent - g.consumed_energy)
    genome._replace_gene(sequence, replace(g, success=g.success + increment,
                                           consumed_energy=new_energy))
    genome.log.append(LogRecord(sequence, "success", energy_spent, timestamp))


def update_on_failure(genome: Genome, sequence: str,
                      decay: float = DEFAULT_FAILURE_DECAY,
                      timestamp: float = 0.0) -> None:
    """Rapidly decrease a failing sequence's success weight (multiplicative)."""
    g = genome.gene(sequence)
    genome._replace_gene(sequence, replace(g, success=g.success * decay))
    genome.log.append(LogRecord(sequence, "failure", 0.0, timestamp))


def replay_log(initial: Genome, log,
               increment: float = DEFAULT_SUCCESS_INCREMENT,
               ema_alpha: float = DEFAULT_EMA_ALPHA,
               decay: float = DEFAULT_FAILURE_DECAY) -> Genome:
    """Reapply an UpdateLog to a copy of the initial genome; reproduces the
    current weights exactly."""
    g = Genome(genes=list(initial.genes), owner=initial.owner)
    for rec in log:
        if rec.outcome == "success":
            update_on_success(g, rec.sequence, rec.energy_spent,
                              increment, ema_alpha, timestamp=rec.timestamp)
        else:
            update_on_failure(g, rec.sequence, decay, timestamp=rec.timestamp)
    return g


def _random_state(rng, opcode=None) -> State:
    ops = list(Opcode)
    op = opcode if opcode is not None else ops[rng.randrange(len(ops))]
    lo, hi = ARG_RANGES[op]
    return State(op, rng.randint(lo, hi))


def mutate(genome: Genome, rng) -> Genome:
    """Replace, insert or delete one State in one non-basic gene.

    A mutation that would break the state cap is re-drawn as a non-growing
    one; if there is no non-basic gene to touch, the genome is unchanged."""
    targets = [i for i, g in enumerate(genome.genes) if g.name not in BASIC_GENE_NAMES]
    genes = list(genome.genes)
    if targets:
        i = targets[rng.randrange(len(targets))]
        g = genes[i]
        ops = ["replace", "insert", "delete"]
        op = ops[rng.randrange(3)]
        if op == "insert" and genome.state_count() >= MAX_GENOME_STATES:
            op = "replace"
        if op == "delete" and len(g.states) == 1:
            op = "replace"
        states = list(g.states)
        j = rng.randrange(len(states))
        if op == "replace":
            states[j] = _random_state(rng)
        elif op == "insert":
            states.insert(j, _random_state(rng))
        else:
            del states[j]
        genes[i] = replace(g, states=tuple(states))
    return Genome(genes=genes, owner=genome.owner, log=list(genome.log))


def recombine(g1: Genome, g2: Genome, rng) -> Genome:
    """Gene-aligned crossover: the child takes genes named before the cut
    point from g1 and after it from g2 (falling back to whichever parent has
    the gene).  Identical parents recombine to themselves."""
    names = sorted({g.name for g in g1.genes if not g.recessive}
                   | {g.name for g in g2.genes if not g.recessive})
    cut = rng.randrange(len(names) + 1)
    by1 = {g.name: g for g in g1.genes if not g.recessive}
    by2 = {g.name: g for g in g2.genes if not g.recessive}
    child = []
    for k, name in enumerate(names):
        primary, backup = (by1, by2) if k < cut else (by2, by1)
        child.append(primary.get(name, backup.get(name)))
    # cap enforcement: shed the lowest-success non-basic genes
    def total(gs):
        return sum(len(g.states) for g in gs)
    while total(child) > MAX_GENOME_STATES:
        removable = [g for g in child if g.name not in BASIC_GENE_NAMES]
        victim = min(removable, key=lambda g: (g.success, g.name))
        child.remove(victim)
    return Genome(genes=child, owner=g1.owner)


def exchange(g1: Genome, g2: Genome, rng):
    """Virtual robot sexuality: each genome receives a copy of one donor gene
    from the other, added when the name is absent or overwriting when the
    donor's success weight is higher.  A direction that would overflow the
    state cap is skipped."""

    def pick(donor: Genome):
        pool = [g for g in donor.genes if not g.recessive]
        return pool[rng.randrange(len(pool))]

    def give(donor_gene: Gene, recipient: Genome):
        if recipient.has_gene(donor_gene.name):
            own = recipient.gene(donor_gene.name)
            if donor_gene.success <= own.success:
                return
            if recipient.state_count() - len(own.states) + len(donor_gene.states) \
                    > MAX_GENOME_STATES:
                return
            recipient._replace_gene(donor_gene.name, replace(donor_gene, recessive=False))
        else:
            if recipient.state_count() + len(donor_gene.states) > MAX_GENOME_STATES:
                return
            recipient.genes.append(replace(donor_gene, recessive=False))

    from_1 = pick(g1)
    from_2 = pick(g2)
    give(from_1, g2)
    give(from_2, g1)
    return g1, g2


def merge_virtual_genome(genomes, owner=None) -> Genome:
    """Build an organism's common genome from its members' genomes.

    Basic genes are unioned with averaged weights; for every other name the
    highest-success variant becomes dominant and all displaced variants are
    retained flagged recessive.  The state cap is enforced by evicting the
    lowest-success recessive genes first."""
    if len(genomes) < 2:
        raise ValueError("need at least two genomes to merge")
    merged = []
    for name in BASIC_GENE_NAMES:
        variants = [g.gene(name) for g in genomes]
        merged.append(replace(
            variants[0],
            success=sum(v.success for v in variants) / len(variants),
            consumed_energy=sum(v.consumed_energy for v in variants) / len(variants)))
    others = {}
    for g in genomes:
        for gene in g.genes:
            if gene.name in BASIC_GENE_NAMES:
                continue
            others.setdefault(gene.name, []).append(gene)
    for name in sorted(others):
        variants = sorted(others[name], key=lambda g: -g.success)
        merged.append(replace(variants[0], recessive=False))
        seen = {(variants[0].states, variants[0].success)}
        for v in variants[1:]:
            key = (v.states, v.success)
            if key in seen:
                continue
            seen.add(key)
            merged.append(replace(v, recessive=True))
    def total(gs):
        return sum(len(g.states) for g in gs)
    while total(merged) > MAX_GENOME_STATES:
        recessives = [g for g in merged if g.recessive]
        if recessives:
            victim = min(recessives, key=lambda g: (g.success, g.name))
        else:
            victim = min((g for g in merged if g.name not in BASIC_GENE_NAMES),
                         key=lambda g: (g.success, g.name))
        merged.remove(victim)
    return Genome(genes=merged, owner=owner)


def divergence(genomes) -> float:
    """Mean pairwise Jaccard distance over dominant gene-name sets; 0 when
    every pair carries the same names."""
    sets = [{g.name for g in gm.genes if not g.recessive} for gm in genomes]
    if len(sets) < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            union = sets[i] | sets[j]
            inter = sets[i] & sets[j]
            total += 1.0 - len(inter) / len(union)
            pairs += 1
    return total / pairs


def serialize_genome(genome: Genome) -> str:
    """Flat versioned text record, persisted so a switched-off robot keeps its
    information."""
    doc = {
        "version": GENOME_FORMAT_VERSION,
        "owner": genome.owner,
        "genes": [
            {
                "name": g.name,
                "recessive": g.recessive,
                "success": g.success,
                "consumed_energy": g.consumed_energy,
                "states": [[s.opcode.value, s.argument] for s in g.states],
            }
            for g in genome.genes
        ],
    }
    return json.dumps(doc, sort_keys=True)


def deserialize_genome(text: str) -> Genome:
    doc = json.loads(text)
    if doc.get("version") != GENOME_FORMAT_VERSION:
        raise ValueError(f"unsupported genome format version: {doc.get('version')}")
    by_value = {op.value: op for op in Opcode}
    genes = [
        Gene(
            name=g["name"],
            states=tuple(State(by_value[op], arg) for op, arg in g["states"]),
            success=g["success"],
            consumed_energy=g["consumed_energy"],
            recessive=g["recessive"],
        )
        for g in doc["genes"]
    ]
    return Genome(genes=genes, owner=doc.get("owner"))


def export_log_csv(genome: Genome, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sequence", "outcome", "energy_spent", "timestamp"])
        for rec in genome.log:
            w.writerow([rec.sequence, rec.outcome, rec.energy_spent, rec.timestamp])

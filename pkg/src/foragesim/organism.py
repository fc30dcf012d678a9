"""Aggregation of robots into a connector graph: DOF accounting, pooled
energy bus with fault isolation, and the abstracted barrier-crossing
capability.

Each robot carries one male connector on the front and three female ones
(both wheels and the back); wheel connectors are rotational joints.  The
3-D overstepping kinematics is replaced by a chain-length predicate:
an organism crosses a barrier of height class h iff it contains a simple
chain of at least h + 2 modules and can afford the actuation energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import networkx as nx

CELL_CAPACITY_MAH = 250.0
DISCHARGE_C_RATE = 4.0           # short-time discharge multiple
DEFAULT_SEGMENT_SIZE = 5         # robots per bus segment
DEFAULT_DOCKED_IDLE_DISCOUNT = 0.5
DEFAULT_ORGANISM_SPEED_FACTOR = 0.6
DEFAULT_CROSSING_DURATION_S = 30.0
CHAIN_OVERHEAD_MODULES = 2       # anchors on either side of the spanned height


class ConnectorKind(Enum):
    MALE = "Male"
    FEMALE = "Female"


class Location(Enum):
    FRONT = "Front"
    LEFT_WHEEL = "LeftWheel"
    RIGHT_WHEEL = "RightWheel"
    BACK = "Back"


ROTATIONAL_LOCATIONS = {Location.LEFT_WHEEL, Location.RIGHT_WHEEL}


@dataclass
class Connector:
    kind: ConnectorKind
    location: Location
    engaged_with: tuple | None = None  # (robot id, Location)

    @property
    def rotational(self) -> bool:
        return self.location in ROTATIONAL_LOCATIONS


def connector_set() -> dict:
    """The fixed per-robot connector layout: one male front, three females."""
    return {
        Location.FRONT: Connector(ConnectorKind.MALE, Location.FRONT),
        Location.LEFT_WHEEL: Connector(ConnectorKind.FEMALE, Location.LEFT_WHEEL),
        Location.RIGHT_WHEEL: Connector(ConnectorKind.FEMALE, Location.RIGHT_WHEEL),
        Location.BACK: Connector(ConnectorKind.FEMALE, Location.BACK),
    }


class DockError(ValueError):
    pass


class OrganismGraph:
    """Docked-connector graph over robot ids.

    Connectivity defines organisms: one organism per connected component of
    two or more robots.  Cycles are allowed."""

    def __init__(self):
        self.graph = nx.Graph()
        self.connectors = {}  # robot id -> {Location: Connector}

    def add_robot(self, rid) -> None:
        if rid not in self.connectors:
            self.connectors[rid] = connector_set()
            self.graph.add_node(rid)

    def dock(self, a, a_loc: Location, b, b_loc: Location) -> None:
        """Engage a's connector at a_loc with b's at b_loc.

        Exactly one side must be the male front; both must be free."""
        if a == b:
            raise DockError("a robot cannot dock to itself")
        self.add_robot(a)
        self.add_robot(b)
        ca = self.connectors[a][a_loc]
        cb = self.connectors[b][b_loc]
        male_sides = (ca.kind is ConnectorKind.MALE) + (cb.kind is ConnectorKind.MALE)
        if male_sides != 1:
            raise DockError(f"incompatible connector kinds: {a_loc.value}-{b_loc.value}")
        if ca.engaged_with is not None or cb.engaged_with is not None:
            raise DockError("connector already engaged")
        if self.graph.has_edge(a, b):
            raise DockError("robots already connected")
        ca.engaged_with = (b, b_loc)
        cb.engaged_with = (a, a_loc)
        female_loc = b_loc if cb.kind is ConnectorKind.FEMALE else a_loc
        self.graph.add_edge(a, b, locs={a: a_loc, b: b_loc},
                            rotational=female_loc in ROTATIONAL_LOCATIONS,
                            back=female_loc is Location.BACK)

    def undock(self, a, b) -> None:
        if not self.graph.has_edge(a, b):
            raise DockError(f"no engaged edge between {a} and {b}")
        locs = self.graph.edges[a, b]["locs"]
        self.connectors[a][locs[a]].engaged_with = None
        self.connectors[b][locs[b]].engaged_with = None
        self.graph.remove_edge(a, b)

    def remove_robot(self, rid) -> None:
        for other in list(self.graph.neighbors(rid)):
            self.undock(rid, other)
        self.graph.remove_node(rid)
        del self.connectors[rid]

    def organisms(self):
        """Connected components with at least two members, as sorted tuples."""
        return [tuple(sorted(c)) for c in nx.connected_components(self.graph)
                if len(c) > 1]

    def component_of(self, rid):
        return tuple(sorted(nx.node_connected_component(self.graph, rid)))

    def joint_dof(self, members=None) -> int:
        """Internal articulation DOF of one organism.

        Each engaged rotational (wheel) connector contributes 2, each engaged
        back connector contributes its pitch allowance of 1, and every edge
        beyond the first adds one coupling DOF; calibrated so a two-robot
        couple via two rotational connectors yields 5."""
        if members is None:
            members = tuple(self.graph.nodes)
        members = set(members)
        edges = [d for u, v, d in self.graph.edges(data=True)
                 if u in members and v in members]
        if not edges:
            return 0
        rot = sum(1 for d in edges if d["rotational"])
        back = sum(1 for d in edges if d["back"])
        return 2 * rot + back + (len(edges) - 1)

    def longest_chain(self, members=None) -> int:
        """Length (node count) of the longest simple path in the component.

        Brute-force DFS; organisms are small (tested up to 13 modules)."""
        if members is None:
            members = tuple(self.graph.nodes)
        members = set(members)
        best = 1 if members else 0

        def dfs(node, visited):
            nonlocal best
            best = max(best, len(visited))
            for nb in self.graph.neighbors(node):
                if nb in members and nb not in visited:
                    visited.add(nb)
                    dfs(nb, visited)
                    visited.remove(nb)

        for start in members:
            dfs(start, {start})
        return best


@dataclass(frozen=True)
class BusSegment:
    robots: tuple
    live: bool = True


class EnergyBus:
    """Per-organism segmented parallel energy pool.

    Cells within a live segment pool in parallel; short-circuit protection
    isolates exactly the segment containing a faulty robot."""

    def __init__(self, segments):
        self.segments = list(segments)

    @classmethod
    def for_members(cls, members, segment_size: int = DEFAULT_SEGMENT_SIZE):
        members = sorted(members)
        segs = [BusSegment(tuple(members[i:i + segment_size]))
                for i in range(0, len(members), segment_size)]
        return cls(segs)

    def live_cells(self) -> int:
        return sum(len(s.robots) for s in self.segments if s.live)

    def pool_energy(self, cell_capacity_mah: float = CELL_CAPACITY_MAH):
        """Pooled capacity (Ah) and short-time max current (A, 4C rule)."""
        capacity_ah = self.live_cells() * cell_capacity_mah / 1000.0
        return capacity_ah, DISCHARGE_C_RATE * capacity_ah

    def isolate_fault(self, rid) -> None:
        for i, seg in enumerate(self.segments):
            if rid in seg.robots:
                self.segments[i] = replace(seg, live=False)
                return
        raise ValueError(f"robot {rid} not on this bus")

    def live_members(self):
        out = []
        for seg in self.segments:
            if seg.live:
                out.extend(seg.robots)
        return out


def min_chain_for(barrier) -> int:
    """Modules needed to overstep: two anchors plus one per height unit."""
    return barrier.height_class + CHAIN_OVERHEAD_MODULES


def crossing_energy_mah(barrier, actuate_draw_ma: float = 400.0,
                        duration_s: float = DEFAULT_CROSSING_DURATION_S) -> float:
    """Actuation energy to overstep, drawn from the pooled supply."""
    return min_chain_for(barrier) * actuate_draw_ma * duration_s / 3600.0


def cross_barrier(graph: OrganismGraph, barrier, members=None,
                  available_mah: float = math.inf,
                  actuate_draw_ma: float = 400.0,
                  duration_s: float = DEFAULT_CROSSING_DURATION_S) -> bool:
    """True iff the organism can overstep the barrier: it must be passable,
    contain a long-enough simple chain, and afford the actuation energy.
    The caller relocates the organism and drains the pool on success."""
    if not barrier.passable_by_organism:
        return False
    if graph.longest_chain(members) < min_chain_for(barrier):
        return False
    return available_mah >= crossing_energy_mah(barrier, actuate_draw_ma, duration_s)

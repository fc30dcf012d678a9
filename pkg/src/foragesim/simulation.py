"""The deterministic tick engine: robots, stations, homeostasis-driven
policies, docking contention, organism aggregation and the event log.

All state is owned by a single Simulation instance and mutated in robot-id
order within each tick, which doubles as the docking tie-break (lower id
docks first).  Per-robot randomness comes from streams seeded as
"<seed>:<robot id>" so adding robots never perturbs existing streams.
"""

from __future__ import annotations

import math
import random

from . import docking
from .arena import Arena, Barrier, Pose, RobotBody, signal_visible, step_motion, wrap_angle
from .battery import ChargeProfile, OCVCurve, charged_charge
from .config import ConfigError, ScenarioConfig
from .docking import DockResult, attempt_dock, make_station
from .genome import (default_genome, divergence, merge_virtual_genome,
                     exchange, select_sequence, update_on_failure, update_on_success)
from .homeostasis import Action, EnergyKind, Thresholds, classify, decide
from .organism import (EnergyBus, Location, OrganismGraph, cross_barrier,
                       crossing_energy_mah, min_chain_for)
from .strategies import (DEAD_BIN, RECHARGING_BIN, TASK_BIN, EfficiencyLedger,
                         make_strategy, nav_step)

SOLO_CONTEXT = ("forage solo",)
FULL_CONTEXT = ("forage solo", "forage aggregate")

MODE_BIN = {
    "task": TASK_BIN,
    "seek": RECHARGING_BIN,
    "wait": RECHARGING_BIN,
    "docked": RECHARGING_BIN,
    "undock": RECHARGING_BIN,
    "rally": RECHARGING_BIN,
    "organism": RECHARGING_BIN,
    "dead": DEAD_BIN,
}


class SimRobot:
    __slots__ = ("id", "pose", "body", "charge", "capacity", "charging", "mode",
                 "logged_mode", "ps", "rng", "genome", "slot", "dock_timer",
                 "undock_timer", "contact", "escalated_at", "fail_streak")

    def __init__(self, rid, pose, body, charge, capacity, rng):
        self.id = rid
        self.pose = pose
        self.body = body
        self.charge = charge
        self.capacity = capacity
        self.charging = False
        self.mode = "task"
        self.logged_mode = None
        self.ps = {}
        self.rng = rng
        self.genome = None
        self.slot = None
        self.dock_timer = 0.0
        self.undock_timer = 0.0
        self.contact = False
        self.escalated_at = 0.0
        self.fail_streak = 0


class Simulation:
    def __init__(self, cfg: ScenarioConfig):
        cfg.validate()
        self.cfg = cfg
        g = cfg.get
        self.seed = g("simulation", "seed")
        self.dt_s = g("simulation", "dt_seconds")
        self.dt_min = self.dt_s / 60.0
        self.total_ticks = round(g("simulation", "duration_minutes") / self.dt_min)
        self.tick = 0
        self.events = []

        width = g("arena", "width_cm")
        height = g("arena", "height_cm")
        self.signal_range = g("arena", "signal_range_cm")
        barriers = []
        self.barrier = None
        if g("barrier", "enabled"):
            by = g("barrier", "y_frac") * height
            self.barrier = Barrier(0.0, by, width, by,
                                   height_class=g("barrier", "height_class"),
                                   passable_by_organism=g("barrier", "passable_by_organism"))
            barriers.append(self.barrier)
        self.arena = Arena(width=width, height=height, barriers=barriers)

        self.body = RobotBody(side=g("robot", "side_cm"), speed=g("robot", "speed_cm_s"))
        self.capacity = g("battery", "capacity_mah")
        self.curve = OCVCurve(cfg.ocv_anchor_pairs())
        self.th = Thresholds(
            v_standby=g("homeostasis", "v_standby"),
            v_critical=g("homeostasis", "v_critical"),
            v_normal=g("homeostasis", "v_normal"),
            v_satisfied=g("homeostasis", "v_satisfied"),
            v_full=g("homeostasis", "v_full"),
            v_ideal_seek=g("homeostasis", "v_ideal_seek"),
            hysteresis=g("homeostasis", "hysteresis"),
            critical_window_minutes=g("homeostasis", "critical_window_minutes"),
        )
        self.c_standby = self.curve.charge_at(self.th.v_standby)
        self.task_priority = g("homeostasis", "task_priority")

        knee = g("battery", "charge_cc_knee")
        self.profile = ChargeProfile(
            cc_rate_per_min=g("battery", "draw_moving_ma") / (60.0 * self.capacity),
            cc_knee=knee,
            full_minutes=g("battery", "charge_full_minutes"))

        def frac_per_tick(draw):
            return draw * self.dt_min / (60.0 * self.capacity)

        discount = g("organism", "docked_idle_discount")
        self.idle_tick = frac_per_tick(g("battery", "draw_idle_ma"))
        self.moving_tick = frac_per_tick(g("battery", "draw_moving_ma"))
        self.actuating_tick = frac_per_tick(g("battery", "draw_actuating_ma"))
        self.organism_idle_tick = self.idle_tick * discount

        strat_kw = {"task_priority": self.task_priority,
                    "p_forward": g("strategy", "p_forward")}
        name = g("strategy", "name")
        if name == "bio-inspired":
            strat_kw["seek_exponent"] = g("strategy", "seek_exponent")
        if name == "hand-coded":
            strat_kw.pop("task_priority")
            strat_kw["seek_level"] = self.task_priority
        self.strategy = make_strategy(name, **strat_kw)
        self.station_visible = g("strategy", "station_visible_cm")

        self.docking_latency = g("docking", "docking_latency_s")
        self.undock_latency = g("docking", "undock_latency_s")
        self.align_tol = g("docking", "align_tolerance_deg")
        self.reservation_timeout_ticks = max(1, round(
            g("docking", "reservation_timeout_minutes") / self.dt_min))
        self._reserved_at = {}
        self.stations = []
        self.all_slots = []
        n_slots = g("station", "slots")
        if n_slots > 0:
            self.stations.append(self._build_station(n_slots))
            for st in self.stations:
                self.all_slots.extend(st.slots)

        self.genome_on = g("genome", "enabled")
        self.epsilon = g("genome", "epsilon")
        self.failure_decay = g("genome", "failure_decay")
        self.success_increment = g("genome", "success_increment")
        self.ema_alpha = g("genome", "ema_alpha")
        self.tier_band = g("genome", "tier_band_mah")
        self.seek_timeout_ticks = max(1, round(g("genome", "seek_timeout_minutes") / self.dt_min))
        self.exchange_every = max(1, round(g("genome", "exchange_interval_s") / self.dt_s))
        self.exchange_cooldown_ticks = max(1, round(
            g("genome", "exchange_cooldown_minutes") / self.dt_min))
        self.exchange_rng = random.Random(f"{self.seed}:exchange")
        self._exchange_last = {}

        self.organism_on = g("organism", "enabled")
        self.segment_size = g("organism", "segment_size")
        self.crossing_duration_s = g("organism", "crossing_duration_s")
        self.rally_grace_ticks = max(1, round(g("organism", "rally_grace_minutes") / self.dt_min))
        self.rally_offset = g("organism", "rally_offset_cm")
        self.actuate_draw = g("battery", "draw_actuating_ma")
        self.rally = []            # escalated, not yet aggregated (robot ids)
        self.rally_counter = 0
        self._rally_full_tick = None
        self.org = None            # active organism dict

        self.robots = self._place_robots()
        self.robot_by_id = {r.id: r for r in self.robots}
        self.alive = len(self.robots)
        self.ledger = EfficiencyLedger([r.id for r in self.robots], self.dt_min)
        self._occluders = None

    # -- construction -------------------------------------------------------

    def _build_station(self, n_slots):
        g = self.cfg.get
        width, height = self.arena.width, self.arena.height
        slot_w = self.body.side + g("docking", "slot_margin_cm")
        length = n_slots * slot_w
        frac = g("station", "center_frac")
        wall = g("station", "wall")
        if wall in ("bottom", "top"):
            cx = frac * width
            x1, x2 = cx - length / 2.0, cx + length / 2.0
            if x1 < 0 or x2 > width:
                raise ConfigError("station does not fit on the wall")
            y = 0.0 if wall == "bottom" else height
            a, b = (x1, y), (x2, y)
        else:
            cy = frac * height
            y1, y2 = cy - length / 2.0, cy + length / 2.0
            if y1 < 0 or y2 > height:
                raise ConfigError("station does not fit on the wall")
            x = 0.0 if wall == "left" else width
            a, b = (x, y1), (x, y2)
        return make_station(a, b, n_slots, body_side=self.body.side,
                            slot_margin=g("docking", "slot_margin_cm"),
                            interior_point=(width / 2.0, height / 2.0))

    def _place_robots(self):
        g = self.cfg.get
        count = g("robot", "count")
        sampler = self.cfg.initial_charge_sampler()
        placement = g("robot", "placement")
        margin = self.body.radius + 3.0
        robots = []
        include_combos = True
        for rid in range(count):
            rng = random.Random(f"{self.seed}:{rid}")
            lo_y, hi_y = margin, self.arena.height - margin
            if placement == "far_side":
                side_of = self.barrier.y1
                station_y = self.stations[0].slots[0].anchor[1] if self.all_slots else 0.0
                if station_y <= side_of:
                    lo_y = side_of + self.body.side + 2.0
                else:
                    hi_y = side_of - self.body.side - 2.0
            pose = None
            for _ in range(500):
                x = rng.uniform(margin, self.arena.width - margin)
                y = rng.uniform(lo_y, hi_y)
                if self.barrier is not None and abs(y - self.barrier.y1) < self.body.side + 1.0:
                    continue
                if any(math.hypot(x - s.anchor[0], y - s.anchor[1]) < 8.0
                       for s in self.all_slots):
                    continue
                if any(math.hypot(x - r.pose.x, y - r.pose.y) < self.body.side + 1.0
                       for r in robots):
                    continue
                pose = Pose(x, y, rng.uniform(0.0, 2.0 * math.pi))
                break
            if pose is None:
                raise ConfigError("could not place robots; arena too crowded")
            robot = SimRobot(rid, pose, self.body, sampler(rng), self.capacity, rng)
            if self.genome_on:
                robot.genome = default_genome(owner=rid, include_combinations=include_combos)
            robots.append(robot)
        return robots

    # -- world queries used by strategies -----------------------------------

    def _occluder_list(self):
        if self._occluders is None:
            rad = self.body.radius
            self._occluders = [(r.id, r.pose.x, r.pose.y, rad) for r in self.robots]
        return self._occluders

    def visible_free_slots(self, robot):
        out = []
        sig = self.signal_range
        sig2 = sig * sig
        px, py = robot.pose.x, robot.pose.y
        for slot in self.all_slots:
            if slot.occupant is not None:
                continue
            if slot.reserved_by not in (None, robot.id):
                continue
            ax, ay = slot.anchor
            dx, dy = ax - px, ay - py
            if dx * dx + dy * dy > sig2:
                continue
            if signal_visible((ax, ay), (px, py), self.arena,
                              robots=self._occluder_list(),
                              exclude_ids=(robot.id,), signal_range=sig):
                out.append(slot)
        return out

    def station_near(self, robot, dist):
        from .arena import point_segment_distance
        for st in self.stations:
            (x1, y1), (x2, y2) = st.wall
            if point_segment_distance(robot.pose.x, robot.pose.y, x1, y1, x2, y2) <= dist:
                return st
        return None

    def _waiting_spot(self, station, index):
        (x1, y1), (x2, y2) = station.wall
        length = math.hypot(x2 - x1, y2 - y1)
        ux, uy = (x2 - x1) / length, (y2 - y1) / length
        slot0 = station.slots[0]
        out = wrap_angle(slot0.approach_heading + math.pi)
        mx, my = (x1 + x2) / 2.0, (y1 + y2) / 2.0
        back = self.body.side * 2.5
        k = (index + 1) // 2
        sign = -1.0 if index % 2 else 1.0
        off = sign * k * (self.body.side + 1.5)
        return (mx + math.cos(out) * back + ux * off,
                my + math.sin(out) * back + uy * off)

    # -- event helpers ------------------------------------------------------

    def _event(self, rid, name, value=""):
        self.events.append((self.tick, rid, name, value))

    # -- robot stepping -----------------------------------------------------

    def _kill(self, r):
        r.mode = "dead"
        self.alive -= 1
        self._event(r.id, "death", f"{r.charge:.6f}")
        if self.org is not None and r.id in self.org["members"]:
            self.org["bus"].isolate_fault(r.id)
            self._event(r.id, "bus_fault")

    def _undock(self, r):
        slot = r.slot
        nx, ny = docking.undock(r, slot, self.body.side)
        r.pose = Pose(nx, ny, wrap_angle(slot.approach_heading + math.pi))
        r.slot = None
        r.charging = False
        r.mode = "undock"
        r.undock_timer = self.undock_latency
        r.ps.clear()
        self._event(r.id, "undock", str(slot.id))

    def _genome_episode_start(self, r):
        seq = select_sequence(r.genome, context=FULL_CONTEXT if self.organism_on
                              else SOLO_CONTEXT, epsilon=self.epsilon,
                              band_mah=self.tier_band)
        # the aggregation routine opens with a solo docking attempt, so the
        # escalated tier only takes over after solo seeking has actually
        # failed since the last successful recharge
        if (seq.name == "forage aggregate" and self.organism_on
                and r.fail_streak > 0):
            self._escalate(r)
            return
        r.ps["ep_tick"] = self.tick
        r.ps["ep_charge"] = r.charge

    def _escalate(self, r):
        r.mode = "rally"
        r.escalated_at = self.tick * self.dt_min
        r.ps.pop("ep_tick", None)
        idx = self.rally_counter
        self.rally_counter += 1
        above = r.pose.y > self.barrier.y1 if self.barrier is not None else True
        sign = 1.0 if above else -1.0
        by = self.barrier.y1 if self.barrier is not None else self.arena.height / 2.0
        x = 12.0 + 7.0 * (idx % 12)
        y = by + sign * (self.rally_offset + 5.0 * (idx // 12))
        r.ps["rally_spot"] = (x, y)
        r.ps.pop("rally_arrived", None)
        self.rally.append(r.id)
        self._event(r.id, "escalate")

    def _genome_dock_success(self, r):
        if not self.genome_on or "ep_tick" not in r.ps:
            return
        spent = max(0.0, (r.ps["ep_charge"] - r.charge)) * self.capacity
        update_on_success(r.genome, "forage solo", spent,
                          increment=self.success_increment, ema_alpha=self.ema_alpha,
                          timestamp=self.tick * self.dt_min)
        r.ps.pop("ep_tick", None)
        r.ps.pop("ep_charge", None)

    def _step_robot(self, r):
        if r.mode == "dead":
            return
        if not r.charging and r.charge < self.c_standby:
            self._kill(r)
            return
        dt_s = self.dt_s

        if r.mode == "docked":
            if r.charging:
                r.charge = charged_charge(r.charge, self.dt_min, self.profile)
                st = classify(self.curve.voltage_at(r.charge), True, self.th)
                act = decide(st, self.task_priority, self.strategy.collective_instinct)
                if self.strategy.should_leave_dock(act):
                    self._undock(r)
            else:
                r.dock_timer -= dt_s
                r.charge = max(0.0, r.charge - self.idle_tick)
                if r.dock_timer <= 0:
                    r.charging = True
                    self._event(r.id, "charge_start", str(r.slot.id))
            return

        if r.mode == "undock":
            r.undock_timer -= dt_s
            r.charge = max(0.0, r.charge - self.idle_tick)
            if r.undock_timer <= 0:
                r.mode = "task"
                r.ps.clear()
            return

        if r.mode == "organism":
            crossing = self.org is not None and self.org["state"] == "crossing" \
                and r.id in self.org["members"]
            drain = self.actuating_tick if crossing else self.organism_idle_tick
            r.charge = max(0.0, r.charge - drain)
            return

        if r.mode == "rally":
            tx, ty = r.ps["rally_spot"]
            d = math.hypot(r.pose.x - tx, r.pose.y - ty)
            if d < 1.5 or (r.contact and d < 5.0):
                r.ps["rally_arrived"] = True
                r.charge = max(0.0, r.charge - self.idle_tick)
                return
            cmd = nav_step(r, tx, ty)
            self._apply_motion(r, cmd)
            r.charge = max(0.0, r.charge - self.moving_tick)
            return

        # task / seek / wait
        st = classify(self.curve.voltage_at(r.charge), False, self.th)
        act = decide(st, self.task_priority, self.strategy.collective_instinct)
        prev_mode = r.mode
        if (self.genome_on and r.mode == "seek" and "ep_tick" in r.ps
                and "target_slot" not in r.ps):
            if self.tick - r.ps["ep_tick"] > self.seek_timeout_ticks:
                update_on_failure(r.genome, "forage solo", decay=self.failure_decay,
                                  timestamp=self.tick * self.dt_min)
                r.fail_streak += 1
                self._event(r.id, "seek_fail")
                self._genome_episode_start(r)
                if r.mode == "rally":
                    r.charge = max(0.0, r.charge - self.idle_tick)
                    return
        intent = self.strategy.step(r, self, act, st)
        if self.genome_on and prev_mode == "task" and r.mode == "seek":
            self._genome_episode_start(r)
            if r.mode == "rally":
                r.charge = max(0.0, r.charge - self.idle_tick)
                return
        kind = intent[0]
        moving = False
        if kind == "cmd":
            cmd = intent[1]
            if cmd[0] != "stop":
                self._apply_motion(r, cmd)
                moving = True
        elif kind == "dock":
            slot = intent[1]
            res = attempt_dock(r, slot, self.body.side, self.align_tol)
            if res is DockResult.DOCKED:
                ax, ay = slot.anchor
                out = wrap_angle(slot.approach_heading + math.pi)
                r.pose = Pose(ax + math.cos(out) * self.body.radius,
                              ay + math.sin(out) * self.body.radius,
                              slot.approach_heading)
                r.mode = "docked"
                r.slot = slot
                r.dock_timer = self.docking_latency
                r.contact = False
                self._event(r.id, "dock", str(slot.id))
                r.fail_streak = 0
                self._genome_dock_success(r)
                r.ps.clear()
            elif res is DockResult.SLOT_TAKEN:
                r.ps.pop("target_slot", None)
                r.ps.pop("dock_phase", None)
            else:
                r.ps["dock_phase"] = "goto"
        elif kind == "join_wait":
            station = intent[1]
            if r.id not in station.waiting:
                station.waiting.append(r.id)
                r.ps["wait_spot"] = self._waiting_spot(station, len(station.waiting) - 1)
                r.mode = "wait"
                if "ep_tick" in r.ps:
                    # reaching the queue is progress, not a failed search
                    r.ps["ep_tick"] = self.tick
                self._event(r.id, "wait")
        r.charge = max(0.0, r.charge - (self.moving_tick if moving else self.idle_tick))

    def _apply_motion(self, r, cmd):
        if cmd[0] == "forward":
            rad = self.body.radius
            obstacles = [(o.pose.x, o.pose.y, rad) for o in self.robots if o is not r]
            pose, contact = step_motion(r.pose, cmd, self.dt_s, self.arena,
                                        self.body, obstacles)
        else:
            pose, contact = step_motion(r.pose, cmd, self.dt_s, self.arena, self.body)
        r.pose = pose
        r.contact = contact

    # -- station admission --------------------------------------------------

    def _admit_waiters(self):
        by_id = self.robot_by_id
        for st in self.stations:
            if st.waiting:
                st.waiting = [rid for rid in st.waiting if by_id[rid].mode == "wait"]
            for slot in st.slots:
                if slot.occupant is not None:
                    continue
                if slot.reserved_by is not None:
                    holder = by_id[slot.reserved_by]
                    stale = (self.tick - self._reserved_at.get(slot.id, self.tick)
                             > self.reservation_timeout_ticks)
                    if holder.mode != "seek" or holder.ps.get("target_slot") is not slot:
                        slot.reserved_by = None
                    elif stale:
                        # the holder cannot reach the slot (blocked approach);
                        # free it up for the next robot in line
                        holder.ps.pop("target_slot", None)
                        holder.ps.pop("dock_phase", None)
                        slot.reserved_by = None
                if slot.reserved_by is None and st.waiting:
                    rid = st.waiting.pop(0)
                    nxt = by_id[rid]
                    nxt.mode = "seek"
                    nxt.ps["target_slot"] = slot
                    nxt.ps["dock_phase"] = "goto"
                    nxt.ps.pop("wait_spot", None)
                    slot.reserved_by = rid
                    self._reserved_at[slot.id] = self.tick

    # -- organism management ------------------------------------------------

    def _organism_tick(self):
        by_id = self.robot_by_id
        self.rally = [rid for rid in self.rally if by_id[rid].mode == "rally"]
        if self.org is None:
            if not self.rally:
                self._rally_full_tick = None
                return
            n_min = min_chain_for(self.barrier) if self.barrier else 2
            arrived = [rid for rid in self.rally if by_id[rid].ps.get("rally_arrived")]
            if len(arrived) >= n_min and self._rally_full_tick is None:
                self._rally_full_tick = self.tick
            all_in = len(arrived) == len(self.rally) and len(arrived) >= n_min
            grace = (self._rally_full_tick is not None
                     and self.tick - self._rally_full_tick >= self.rally_grace_ticks)
            if all_in or grace:
                self._form_organism(arrived)
                return
            if len(arrived) < n_min:
                # too few responders to ever form a chain: anyone whose own
                # grace period has lapsed gives up and forages solo again
                for rid in list(self.rally):
                    r = by_id[rid]
                    esc_tick = round(r.escalated_at / self.dt_min)
                    if self.tick - esc_tick > self.rally_grace_ticks:
                        self.rally.remove(rid)
                        r.mode = "seek"
                        r.ps.clear()
                        r.ps["ep_tick"] = self.tick
                        r.ps["ep_charge"] = r.charge
                        self._event(rid, "rally_abandon")
            return
        if self.org["state"] == "crossing":
            self.org["timer"] -= self.dt_s
            if self.org["timer"] <= 0:
                self._complete_crossing()

    def _form_organism(self, members):
        by_id = self.robot_by_id
        graph = OrganismGraph()
        for rid in members:
            graph.add_robot(rid)
        for prev, nxt in zip(members, members[1:]):
            graph.dock(nxt, Location.FRONT, prev, Location.BACK)
        bus = EnergyBus.for_members(members, self.segment_size)
        org_genome = None
        if self.genome_on and len(members) >= 2:
            org_genome = merge_virtual_genome([by_id[rid].genome for rid in members],
                                              owner=f"organism@{self.tick}")
        for rid in members:
            by_id[rid].mode = "organism"
        self.rally = [rid for rid in self.rally if rid not in members]
        self._rally_full_tick = None
        self.org = {"state": "formed", "members": list(members), "graph": graph,
                    "bus": bus, "timer": 0.0, "genome": org_genome}
        self._event(-1, "organism_form", str(len(members)))
        edges = ";".join(f"{min(u, v)}-{max(u, v)}"
                         for u, v in sorted(tuple(sorted(e)) for e in graph.graph.edges))
        segs = "|".join(",".join(str(rid) for rid in seg.robots)
                        for seg in bus.segments)
        self._event(-1, "organism_edges", edges)
        self._event(-1, "organism_segments", segs)
        available = sum(by_id[rid].charge * self.capacity
                        for rid in bus.live_members())
        if cross_barrier(graph, self.barrier, members, available,
                         self.actuate_draw, self.crossing_duration_s):
            self.org["state"] = "crossing"
            self.org["timer"] = self.crossing_duration_s
            self._event(-1, "organism_cross_start", str(len(members)))
        else:
            self._event(-1, "organism_cross_failed", str(len(members)))
            self._disband(success=False)

    def _drop_positions(self, members):
        by = self.barrier.y1
        above = self.robot_by_id[members[0]].pose.y > by
        sign = -1.0 if above else 1.0
        ydrop = by + sign * 12.0
        rad = self.body.radius
        out = []
        for i, rid in enumerate(members):
            x = 12.0 + 7.0 * i
            while any(math.hypot(x - r.pose.x, ydrop - r.pose.y) < self.body.side + 1.0
                      for r in self.robots if r.id not in members):
                x += 3.5
            out.append((x, ydrop))
        return out

    def _complete_crossing(self):
        by_id = self.robot_by_id
        members = [rid for rid in self.org["members"] if by_id[rid].mode == "organism"]
        drops = self._drop_positions(members)
        heading_down = 1.5 * math.pi if by_id[members[0]].pose.y > self.barrier.y1 else 0.5 * math.pi
        per_member_mah = self.actuate_draw * self.crossing_duration_s / 3600.0
        now_min = self.tick * self.dt_min
        for rid, (x, y) in zip(members, drops):
            r = by_id[rid]
            r.pose = Pose(x, y, heading_down)
        self._event(-1, "organism_cross", str(len(members)))
        self._disband(success=True)
        for rid in members:
            r = by_id[rid]
            if self.genome_on:
                update_on_success(r.genome, "forage aggregate", per_member_mah,
                                  increment=self.success_increment,
                                  ema_alpha=self.ema_alpha, timestamp=now_min)
                self._event(rid, "delayed_fitness",
                            f"{now_min - r.escalated_at:.4f}")

    def _disband(self, success: bool):
        by_id = self.robot_by_id
        members = self.org["members"]
        now_min = self.tick * self.dt_min
        for rid in members:
            r = by_id[rid]
            if r.mode != "organism":
                continue
            r.mode = "seek"
            r.ps.clear()
            if self.genome_on and not success:
                update_on_failure(r.genome, "forage aggregate",
                                  decay=self.failure_decay, timestamp=now_min)
            if self.genome_on and success:
                # the seek that follows a crossing is a fresh solo-foraging
                # episode, so a dock on the near side rebuilds the solo
                # sequence's success weight
                r.ps["ep_tick"] = self.tick
                r.ps["ep_charge"] = r.charge
        self._event(-1, "organism_split", str(len(members)))
        self.org = None

    # -- genome exchange ----------------------------------------------------

    def _exchange_tick(self):
        sig2 = self.signal_range * self.signal_range
        pool = [r for r in self.robots if r.mode in ("task", "seek", "wait")]
        for i in range(len(pool)):
            a = pool[i]
            for j in range(i + 1, len(pool)):
                b = pool[j]
                dx = a.pose.x - b.pose.x
                dy = a.pose.y - b.pose.y
                if dx * dx + dy * dy > sig2:
                    continue
                key = (a.id, b.id)
                last = self._exchange_last.get(key)
                if last is not None and self.tick - last < self.exchange_cooldown_ticks:
                    continue
                self._exchange_last[key] = self.tick
                exchange(a.genome, b.genome, self.exchange_rng)
                self._event(a.id, "gene_exchange", str(b.id))

    # -- main loop ----------------------------------------------------------

    def step(self):
        self._occluders = None
        for r in self.robots:
            self._step_robot(r)
        if self.all_slots:
            self._admit_waiters()
        if self.organism_on:
            self._organism_tick()
        if self.genome_on and self.tick % self.exchange_every == 0 and self.tick:
            self._exchange_tick()
        for r in self.robots:
            self.ledger.add(r.id, MODE_BIN[r.mode])
            if r.mode != r.logged_mode:
                self._event(r.id, "mode", r.mode)
                r.logged_mode = r.mode
        self.tick += 1

    def run(self):
        # initial mode events at tick 0 are emitted by the first flush
        while self.tick < self.total_ticks:
            self.step()
            if self.alive == 0:
                remaining = self.total_ticks - self.tick
                for r in self.robots:
                    self.ledger.counts[r.id][DEAD_BIN] += remaining
                self.tick = self.total_ticks
                break
        if self.genome_on:
            div = divergence([r.genome for r in self.robots])
            self.events.append((self.total_ticks, -1, "genome_divergence", f"{div:.6f}"))
        return self.events

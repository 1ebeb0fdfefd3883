"""Energy- and transfer-constrained multi-modal route optimization.

Positions are edge states: being "at" an edge means standing at its
downstream node, having just traversed it. A plan from origin to
destination is the sequence of edges traversed after the origin edge, each
annotated with a mode; mode changes are only possible at station edges
(pickup needs an available vehicle, walking is always an option), and a
trip may only end in a motorized mode at a station edge (vehicles dock).

The solver is exact label-setting over the mode-expanded graph with
dominance on (time, transfers, per-mode energy); ties between optimal
plans break on fewer transfers, then the lexicographically smallest
edge-id sequence, then the mode sequence. The brute-force oracle
enumerates all feasible mode-annotated simple paths and must agree with
the solver exactly.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time as _time
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import NoRouteError, NotAvailable, ValidationError
from .network import (
    MODE_CLASS,
    AgentClass,
    Edge,
    EnergyModelParams,
    NetworkGraph,
    TransportMode,
)
from .stations import Station, apply_transaction, pick_unit, query_availability
from .store import Datastore, EdgeTrafficRecord


class TrafficSnapshot:
    """Per-edge per-class speed lookup used to weight the expanded graph."""

    def __init__(self, speeds: Mapping[str, Mapping[AgentClass, Optional[float]]]):
        self._speeds = speeds

    def speed(self, edge_id: str, cls: AgentClass) -> Optional[float]:
        by_class = self._speeds.get(edge_id)
        if by_class is None:
            return None
        return by_class.get(cls)

    @classmethod
    def free_flow(cls, graph: NetworkGraph) -> "TrafficSnapshot":
        table = {}
        for e in graph.edges:
            table[e.edge_id] = {
                c: (e.free_flow_mps[c] if e.allows(c) else None)
                for c in AgentClass
            }
        return cls(table)

    @classmethod
    def from_records(cls, records: Iterable[EdgeTrafficRecord]) -> "TrafficSnapshot":
        table = {}
        for r in records:
            table[r.edge_id] = {
                AgentClass.PEDESTRIAN: r.pedestrian_speed,
                AgentClass.BICYCLE: r.bike_speed,
                AgentClass.CAR: r.car_speed,
            }
        return cls(table)


def energy_cost(edge: Edge, mode: TransportMode, speed: float,
                params: EnergyModelParams) -> float:
    """Watt-hours to traverse the edge: (base + coeff * v^2) * km; walking
    costs nothing."""
    if mode == TransportMode.WALK:
        return 0.0
    if speed <= 0:
        raise ValidationError("speed must be > 0 for motorized modes")
    base = params.base_wh_per_km.get(mode, 0.0)
    coeff = params.speed_coeff_wh_s2_per_km_m2.get(mode, 0.0)
    return (base + coeff * speed * speed) * (edge.length_m / 1000.0)


@dataclass(frozen=True)
class RouteRequest:
    origin_edge: str
    destination_edge: str
    max_transfers: int = 2
    modes: frozenset[TransportMode] = frozenset(TransportMode)
    energy_budget_wh: Mapping[TransportMode, float] = field(default_factory=dict)
    min_battery_pct: float = 0.0

    def __post_init__(self) -> None:
        if self.max_transfers < 0:
            raise ValidationError("max_transfers must be >= 0")
        for mode, budget in self.energy_budget_wh.items():
            if budget < 0:
                raise ValidationError(
                    f"energy budget for {mode.value} must be >= 0")

    @property
    def allowed_modes(self) -> tuple[TransportMode, ...]:
        modes = set(self.modes) | {TransportMode.WALK}
        return tuple(sorted(modes, key=lambda m: m.value))

    def budget(self, mode: TransportMode) -> float:
        return self.energy_budget_wh.get(mode, math.inf)


@dataclass(frozen=True)
class ModeLeg:
    mode: TransportMode
    edge_ids: tuple[str, ...]
    leg_time_s: float
    leg_energy_wh: float


@dataclass(frozen=True)
class RoutePlan:
    origin_edge: str
    destination_edge: str
    legs: tuple[ModeLeg, ...]
    total_time_s: float
    execution_time_ms: float = 0.0

    @property
    def transfers(self) -> int:
        return max(0, len(self.legs) - 1)

    def edge_mode_sequence(self) -> list[tuple[str, TransportMode]]:
        return [(eid, leg.mode) for leg in self.legs for eid in leg.edge_ids]

    def serialized_sequence(self) -> str:
        """'(edge,mode)' groups joined by commas, one group per edge."""
        return ",".join(f"({eid},{mode.value})"
                        for eid, mode in self.edge_mode_sequence())

    def energy_by_mode(self) -> dict[TransportMode, float]:
        out: dict[TransportMode, float] = {}
        for leg in self.legs:
            out[leg.mode] = out.get(leg.mode, 0.0) + leg.leg_energy_wh
        return out

    def canonical_dict(self) -> dict:
        """Deterministic plan content; solver wall time excluded."""
        return {
            "origin_edge": self.origin_edge,
            "destination_edge": self.destination_edge,
            "total_time_s": self.total_time_s,
            "transfers": self.transfers,
            "legs": [{
                "mode": leg.mode.value,
                "edges": list(leg.edge_ids),
                "leg_time_s": leg.leg_time_s,
                "leg_energy_wh": leg.leg_energy_wh,
            } for leg in self.legs],
        }


@dataclass(frozen=True)
class MovementArc:
    to_edge: str
    time_s: float
    energy_wh: float


@dataclass
class ModeExpandedGraph:
    """Layered routing graph: one edge layer per mode plus transfer arcs at
    station edges."""

    modes: tuple[TransportMode, ...]
    origin_edge: str
    destination_edge: str
    movement: dict[tuple[str, TransportMode], tuple[MovementArc, ...]]
    transfers: dict[str, frozenset[tuple[TransportMode, TransportMode]]]
    station_edges: frozenset[str]
    base_edge_count: int

    def movement_arcs(self) -> list[tuple[str, TransportMode, MovementArc]]:
        out = []
        for (from_edge, mode), arcs in sorted(self.movement.items()):
            for arc in arcs:
                out.append((from_edge, mode, arc))
        return out

    def transfer_arcs(self) -> list[tuple[str, TransportMode, TransportMode]]:
        out = []
        for edge_id, pairs in sorted(self.transfers.items()):
            for m1, m2 in sorted(pairs, key=lambda p: (p[0].value, p[1].value)):
                out.append((edge_id, m1, m2))
        return out

    def arc_lookup(self, from_edge: str, mode: TransportMode,
                   to_edge: str) -> MovementArc:
        for arc in self.movement.get((from_edge, mode), ()):
            if arc.to_edge == to_edge:
                return arc
        raise KeyError((from_edge, mode, to_edge))

    def transfer_allowed(self, edge_id: str, from_mode: TransportMode,
                         to_mode: TransportMode) -> bool:
        return (from_mode, to_mode) in self.transfers.get(edge_id, frozenset())


def expand_graph(graph: NetworkGraph, stations: Sequence[Station],
                 request: RouteRequest, traffic: TrafficSnapshot,
                 energy_params: Optional[EnergyModelParams] = None,
                 ) -> ModeExpandedGraph:
    """Build the layered graph for one request.

    Movement arcs within layer m connect an edge to each onward edge the
    mode's agent class may traverse at nonzero speed; transfer arcs exist
    only at station edges, into a motorized layer only when a vehicle of
    that type is available, and into the walk layer unconditionally.
    """
    params = energy_params or EnergyModelParams()
    modes = request.allowed_modes
    edge_list = sorted(graph.edges, key=lambda e: e.edge_id)

    available: dict[TransportMode, set[str]] = {m: set() for m in modes}
    station_edges = set()
    for st in sorted(stations, key=lambda s: s.station_id):
        station_edges.add(st.edge_id)
        for mode in modes:
            if mode == TransportMode.WALK:
                continue
            if query_availability(st, mode, request.min_battery_pct) > 0:
                available[mode].add(st.edge_id)

    movement: dict[tuple[str, TransportMode], tuple[MovementArc, ...]] = {}
    for mode in modes:
        cls = MODE_CLASS[mode]
        for e1 in edge_list:
            arcs = []
            for e2 in sorted(graph.outgoing(e1.to_node), key=lambda e: e.edge_id):
                speed = traffic.speed(e2.edge_id, cls)
                if speed is None or speed <= 0:
                    continue
                arcs.append(MovementArc(
                    to_edge=e2.edge_id,
                    time_s=e2.length_m / speed,
                    energy_wh=energy_cost(e2, mode, speed, params),
                ))
            if arcs:
                movement[(e1.edge_id, mode)] = tuple(arcs)

    transfers: dict[str, frozenset] = {}
    for edge_id in sorted(station_edges):
        pairs = set()
        for m1 in modes:
            for m2 in modes:
                if m1 == m2:
                    continue
                if m2 == TransportMode.WALK or edge_id in available[m2]:
                    pairs.add((m1, m2))
        if pairs:
            transfers[edge_id] = frozenset(pairs)

    return ModeExpandedGraph(
        modes=modes,
        origin_edge=request.origin_edge,
        destination_edge=request.destination_edge,
        movement=movement,
        transfers=transfers,
        station_edges=frozenset(station_edges),
        base_edge_count=len(edge_list),
    )


def _empty_plan(request: RouteRequest) -> RoutePlan:
    return RoutePlan(
        origin_edge=request.origin_edge,
        destination_edge=request.destination_edge,
        legs=(),
        total_time_s=0.0,
    )


def _mode_change_ok(xg: ModeExpandedGraph, at_edge: str,
                    last_mode: Optional[TransportMode],
                    new_mode: TransportMode) -> bool:
    if last_mode == new_mode:
        return True
    if last_mode is None:
        # journey start: walking is free, a vehicle needs a dock at the origin
        if new_mode == TransportMode.WALK:
            return True
        return xg.transfer_allowed(at_edge, TransportMode.WALK, new_mode)
    return xg.transfer_allowed(at_edge, last_mode, new_mode)


def _accepting(xg: ModeExpandedGraph, mode: TransportMode) -> bool:
    # a motorized trip may only end where the vehicle can dock
    return mode == TransportMode.WALK or xg.destination_edge in xg.station_edges


def _plan_from_sequence(request: RouteRequest, xg: ModeExpandedGraph,
                        edges: Sequence[str], modes: Sequence[TransportMode],
                        ) -> RoutePlan:
    legs: list[ModeLeg] = []
    total = 0.0
    i = 0
    prev_edge = request.origin_edge
    while i < len(edges):
        mode = modes[i]
        leg_edges = []
        leg_time = 0.0
        leg_energy = 0.0
        while i < len(edges) and modes[i] == mode:
            arc = xg.arc_lookup(prev_edge, mode, edges[i])
            leg_time += arc.time_s
            leg_energy += arc.energy_wh
            total += arc.time_s
            leg_edges.append(edges[i])
            prev_edge = edges[i]
            i += 1
        legs.append(ModeLeg(mode=mode, edge_ids=tuple(leg_edges),
                            leg_time_s=leg_time, leg_energy_wh=leg_energy))
    return RoutePlan(
        origin_edge=request.origin_edge,
        destination_edge=request.destination_edge,
        legs=tuple(legs),
        total_time_s=total,
    )


_MODE_ORDER = {m: m.value for m in TransportMode}


def solve_route(request: RouteRequest, xg: ModeExpandedGraph) -> RoutePlan:
    """Exact minimum-time plan under transfer and energy constraints.

    Label-setting with dominance pruning; the first target label popped in
    (time, transfers, edge sequence, mode sequence) order is the optimum
    under the documented tie-break.
    """
    t0 = _time.perf_counter()
    if request.origin_edge == request.destination_edge:
        plan = _empty_plan(request)
        return replace(plan, execution_time_ms=(_time.perf_counter() - t0) * 1e3)

    tracked = tuple(m for m in request.allowed_modes
                    if m != TransportMode.WALK
                    and math.isfinite(request.budget(m)))
    tracked_idx = {m: i for i, m in enumerate(tracked)}
    zero_energy = (0.0,) * len(tracked)

    counter = itertools.count()
    # heap key: (time, transfers, edge seq, mode-seq values, tiebreak id)
    start_state = (request.origin_edge, None)
    heap = [(0.0, 0, (), (), next(counter), start_state, zero_energy)]
    # state -> list of (label_id, time, transfers, energy, seqkey)
    frontier: dict[tuple, list] = {start_state: [(0, 0.0, 0, zero_energy, ((), ()))]}
    alive = {0}
    label_ids = itertools.count(1)

    while heap:
        time_s, transfers, edge_seq, mode_seq, _, state, energy = heapq.heappop(heap)
        cur_edge, last_mode = state
        entry_ids = [lid for lid, t, tr, en, sk in frontier.get(state, ())
                     if t == time_s and tr == transfers and en == energy
                     and sk == (edge_seq, mode_seq)]
        if not entry_ids or entry_ids[0] not in alive:
            continue
        if cur_edge == request.destination_edge and last_mode is not None \
                and _accepting(xg, last_mode):
            plan = _plan_from_sequence(
                request, xg, list(edge_seq),
                [TransportMode(v) for v in mode_seq])
            return replace(plan,
                           execution_time_ms=(_time.perf_counter() - t0) * 1e3)

        for mode in request.allowed_modes:
            if not _mode_change_ok(xg, cur_edge, last_mode, mode):
                continue
            new_transfers = transfers + (
                1 if last_mode is not None and mode != last_mode else 0)
            if new_transfers > request.max_transfers:
                continue
            for arc in xg.movement.get((cur_edge, mode), ()):
                new_time = time_s + arc.time_s
                new_energy = energy
                if mode in tracked_idx:
                    i = tracked_idx[mode]
                    total = energy[i] + arc.energy_wh
                    if total > request.budget(mode):
                        continue
                    new_energy = energy[:i] + (total,) + energy[i + 1:]
                new_state = (arc.to_edge, mode)
                new_seq = (edge_seq + (arc.to_edge,),
                           mode_seq + (_MODE_ORDER[mode],))
                if not _admit(frontier, alive, new_state, new_time,
                              new_transfers, new_energy, new_seq, label_ids):
                    continue
                heapq.heappush(heap, (new_time, new_transfers, new_seq[0],
                                      new_seq[1], next(counter), new_state,
                                      new_energy))
    raise NoRouteError(
        f"no feasible route {request.origin_edge} -> {request.destination_edge}")


def _admit(frontier: dict, alive: set, state, time_s: float, transfers: int,
           energy: tuple, seqkey: tuple, label_ids) -> bool:
    """Dominance filter; returns False if an existing label makes the new
    one irrelevant, otherwise records it and evicts labels it dominates.

    Energy only gates feasibility, never the final tie-break, so a label
    that is merely energy-better may not displace one whose sequence wins
    the (time, transfers, sequence) key.
    """
    entries = frontier.setdefault(state, [])
    for lid, t, tr, en, sk in entries:
        if lid not in alive:
            continue
        if t <= time_s and tr <= transfers and _le(en, energy):
            if t < time_s or tr < transfers or sk <= seqkey:
                return False
    kept = []
    for entry in entries:
        lid, t, tr, en, sk = entry
        if lid not in alive:
            continue
        if time_s <= t and transfers <= tr and _le(energy, en) \
                and (time_s < t or transfers < tr or seqkey <= sk):
            alive.discard(lid)
            continue
        kept.append(entry)
    new_id = next(label_ids)
    kept.append((new_id, time_s, transfers, energy, seqkey))
    frontier[state] = kept
    alive.add(new_id)
    return True


def _le(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def brute_force_oracle(request: RouteRequest, xg: ModeExpandedGraph) -> RoutePlan:
    """Exhaustive enumeration of feasible mode-annotated simple paths.

    Intended for small instances (roughly <= 15 base edges); applies the
    same feasibility rules and tie-break as solve_route but searches by
    depth-first enumeration with only optimality-safe pruning.
    """
    t0 = _time.perf_counter()
    if request.origin_edge == request.destination_edge:
        plan = _empty_plan(request)
        return replace(plan, execution_time_ms=(_time.perf_counter() - t0) * 1e3)

    best: list = [None]  # (time, transfers, edges, mode values)

    def consider(time_s, transfers, edges, modes):
        key = (time_s, transfers, tuple(edges), tuple(modes))
        if best[0] is None or key < best[0]:
            best[0] = key

    budgets = {m: request.budget(m) for m in request.allowed_modes}

    def dfs(cur_edge, last_mode, time_s, transfers, energy, edges, modes, visited):
        if cur_edge == request.destination_edge and last_mode is not None \
                and _accepting(xg, last_mode):
            consider(time_s, transfers, edges, modes)
        if best[0] is not None and time_s >= best[0][0]:
            return
        for mode in request.allowed_modes:
            if not _mode_change_ok(xg, cur_edge, last_mode, mode):
                continue
            new_transfers = transfers + (
                1 if last_mode is not None and mode != last_mode else 0)
            if new_transfers > request.max_transfers:
                continue
            for arc in xg.movement.get((cur_edge, mode), ()):
                state = (arc.to_edge, mode)
                if state in visited:
                    continue
                new_energy = energy.get(mode, 0.0) + arc.energy_wh
                if new_energy > budgets[mode]:
                    continue
                energy[mode] = new_energy
                visited.add(state)
                edges.append(arc.to_edge)
                modes.append(_MODE_ORDER[mode])
                dfs(arc.to_edge, mode, time_s + arc.time_s, new_transfers,
                    energy, edges, modes, visited)
                edges.pop()
                modes.pop()
                visited.discard(state)
                energy[mode] = new_energy - arc.energy_wh

    dfs(request.origin_edge, None, 0.0, 0, {}, [], [], set())
    if best[0] is None:
        raise NoRouteError(
            f"no feasible route {request.origin_edge} -> "
            f"{request.destination_edge}")
    time_s, transfers, edges, mode_values = best[0]
    plan = _plan_from_sequence(request, xg, list(edges),
                               [TransportMode(v) for v in mode_values])
    return replace(plan, execution_time_ms=(_time.perf_counter() - t0) * 1e3)


def validate_plan(plan: RoutePlan, request: RouteRequest,
                  xg: ModeExpandedGraph) -> None:
    """Raise ValidationError if the plan violates any request constraint."""
    if plan.transfers > request.max_transfers:
        raise ValidationError("plan exceeds max_transfers")
    for mode, used in plan.energy_by_mode().items():
        if used > request.budget(mode) + 1e-9:
            raise ValidationError(f"plan exceeds {mode.value} energy budget")
    prev_edge = plan.origin_edge
    for i, leg in enumerate(plan.legs):
        if not leg.edge_ids:
            raise ValidationError("empty leg")
        if leg.mode != TransportMode.WALK:
            if prev_edge not in xg.station_edges:
                raise ValidationError(
                    f"leg {i} starts a {leg.mode.value} ride away from a station")
            if leg.edge_ids[-1] not in xg.station_edges:
                raise ValidationError(
                    f"leg {i} ends a {leg.mode.value} ride away from a station")
        prev_edge = leg.edge_ids[-1]
    if plan.legs and plan.legs[-1].edge_ids[-1] != plan.destination_edge:
        raise ValidationError("plan does not end at the destination edge")


@dataclass(frozen=True)
class UserPathRecord:
    path_id: int
    start_edge: str
    end_edge: str
    time_cost_s: float
    execution_time_ms: float
    optimal_path_sequence: str


def commit_route(plan: RoutePlan, stations: Sequence[Station],
                 store: Datastore) -> UserPathRecord:
    """Apply station transactions for the plan and persist the trip row.

    Pickups come from the station on the edge preceding each motorized leg
    (the origin edge for the first leg); dropoffs dock at the station on
    the leg's last edge, with batteries drained by the leg energy.
    """
    by_edge: dict[str, list[Station]] = {}
    for st in sorted(stations, key=lambda s: s.station_id):
        by_edge.setdefault(st.edge_id, []).append(st)

    def station_with_unit(edge_id: str, mode: TransportMode) -> Station:
        for st in by_edge.get(edge_id, ()):
            if query_availability(st, mode) > 0:
                return st
        raise NotAvailable(
            f"no {mode.value} available at edge {edge_id}")

    def station_with_dock(edge_id: str) -> Station:
        for st in by_edge.get(edge_id, ()):
            if st.free_docks() > 0:
                return st
        raise NotAvailable(f"no free dock at edge {edge_id}")

    prev_edge = plan.origin_edge
    moves = []  # (pickup station, dropoff station, unit, leg energy)
    for leg in plan.legs:
        if leg.mode != TransportMode.WALK:
            src = station_with_unit(prev_edge, leg.mode)
            unit = pick_unit(src, leg.mode)
            dst = station_with_dock(leg.edge_ids[-1]) \
                if leg.edge_ids[-1] != src.edge_id else src
            moves.append((src, dst, unit, leg.leg_energy_wh))
        prev_edge = leg.edge_ids[-1]

    applied = []
    try:
        for src, dst, unit, energy in moves:
            apply_transaction(src, "pickup", unit)
            applied.append((src, unit))
            drained = unit.drained(energy)
            apply_transaction(dst, "dropoff", drained)
            applied.append((dst, drained))
    except Exception:
        # roll back partial moves so inventories stay conserved
        for st, unit in reversed(applied):
            if any(u.vehicle_id == unit.vehicle_id for u in st.inventory):
                apply_transaction(st, "pickup", unit)
            else:
                apply_transaction(st, "dropoff", unit)
        raise

    store.replace_station_rows(stations)
    path_id = store.insert_user_path(
        plan.origin_edge, plan.destination_edge, plan.total_time_s,
        plan.execution_time_ms, plan.serialized_sequence())
    return UserPathRecord(
        path_id=path_id,
        start_edge=plan.origin_edge,
        end_edge=plan.destination_edge,
        time_cost_s=plan.total_time_s,
        execution_time_ms=plan.execution_time_ms,
        optimal_path_sequence=plan.serialized_sequence(),
    )

"""Mesoscopic multi-modal traffic simulator.

Count-based dynamics with a linear density-speed law: per-edge, per-class
agent counts set speeds, agents advance along free-flow shortest paths
sampled at spawn time, and per-window mean speeds stream to a sink as
traffic records. One-second ticks; deterministic for a fixed seed.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import OutOfHorizon, SinkError, ValidationError
from .network import (
    ALL_CLASSES,
    AgentClass,
    DemandSchedule,
    Edge,
    NetworkGraph,
    ScenarioConfig,
    build_graph,
)
from .store import EdgeTrafficRecord

# Movement keeps a minimal crawl so saturated edges drain instead of
# gridlocking; emitted records still report the raw law value.
MIN_MOVE_SPEED = 0.05

CLASS_INDEX = {cls: i for i, cls in enumerate(ALL_CLASSES)}


def spawn_rate_at(schedule: DemandSchedule, t: float, multiplier: float = 1.0) -> float:
    """Spawns per second at time t: multiplier / period of the interval."""
    if t < 0 or t >= schedule.horizon_s:
        raise OutOfHorizon(f"t={t} outside [0, {schedule.horizon_s})")
    return multiplier / schedule.period_at(t)


def edge_speed(cls: AgentClass, count: float, edge: Edge) -> float:
    """Linear density-speed law, clamped to [0, free flow]."""
    if count < 0:
        raise ValidationError("agent count must be >= 0")
    if not edge.allows(cls):
        return 0.0
    v_free = edge.free_flow_mps[cls]
    k = count / edge.length_m
    v = v_free * (1.0 - k / edge.jam_density[cls])
    return float(min(max(v, 0.0), v_free))


class _NetworkArrays:
    """Edge attributes in numpy form, indexed in sorted-edge-id order."""

    def __init__(self, graph: NetworkGraph):
        edges = sorted(graph.edges, key=lambda e: e.edge_id)
        self.edges = edges
        self.edge_ids = [e.edge_id for e in edges]
        self.edge_index = {e.edge_id: i for i, e in enumerate(edges)}
        n_cls = len(ALL_CLASSES)
        E = len(edges)
        self.length = np.array([e.length_m for e in edges])
        self.vfree = np.zeros((E, n_cls))
        self.kjam = np.ones((E, n_cls))
        self.allowed = np.zeros((E, n_cls), dtype=bool)
        for i, e in enumerate(edges):
            for cls in e.allowed_classes:
                c = CLASS_INDEX[cls]
                self.allowed[i, c] = True
                self.vfree[i, c] = e.free_flow_mps[cls]
                self.kjam[i, c] = e.jam_density[cls]
        self.nodes = sorted(graph.nodes)
        self.node_index = {n: i for i, n in enumerate(self.nodes)}
        self.from_idx = np.array([self.node_index[e.from_node] for e in edges])
        self.to_idx = np.array([self.node_index[e.to_node] for e in edges])
        self.allowed_edges = [np.nonzero(self.allowed[:, c])[0]
                              for c in range(n_cls)]

    def speed_matrix(self, counts: np.ndarray) -> np.ndarray:
        """Per-edge per-class law speeds for the given count matrix."""
        k = counts / self.length[:, None]
        v = self.vfree * (1.0 - k / self.kjam)
        return np.clip(v, 0.0, self.vfree)


class _Router:
    """Free-flow shortest paths per agent class, with a path cache."""

    def __init__(self, arrays: _NetworkArrays):
        self.arrays = arrays
        V = len(arrays.nodes)
        self.pred: list[np.ndarray] = []
        self.edge_of: list[dict[tuple[int, int], int]] = []
        for c in range(len(ALL_CLASSES)):
            mask = arrays.allowed[:, c]
            times = np.full(len(arrays.edges), np.inf)
            times[mask] = arrays.length[mask] / arrays.vfree[mask, c]
            best: dict[tuple[int, int], int] = {}
            for i in np.nonzero(mask)[0]:
                key = (int(arrays.from_idx[i]), int(arrays.to_idx[i]))
                if key not in best or times[i] < times[best[key]]:
                    best[key] = int(i)
            rows = [k[0] for k in best]
            cols = [k[1] for k in best]
            vals = [times[i] for i in best.values()]
            graph = csr_matrix((vals, (rows, cols)), shape=(V, V))
            _, pred = dijkstra(graph, directed=True, return_predecessors=True)
            self.pred.append(pred)
            self.edge_of.append(best)
        self._cache: dict[tuple[int, int, int], list[int]] = {}

    def edge_path(self, c: int, origin_edge: int, dest_edge: int) -> list[int]:
        """Edge index sequence origin..dest; just the origin if unreachable."""
        key = (c, origin_edge, dest_edge)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        arrays = self.arrays
        if origin_edge == dest_edge:
            path = [origin_edge]
        else:
            u = int(arrays.to_idx[origin_edge])
            w = int(arrays.from_idx[dest_edge])
            if u == w:
                path = [origin_edge, dest_edge]
            else:
                pred = self.pred[c]
                nodes = [w]
                ok = True
                while nodes[-1] != u:
                    p = pred[u, nodes[-1]]
                    if p < 0:
                        ok = False
                        break
                    nodes.append(int(p))
                if ok:
                    nodes.reverse()
                    mids = [self.edge_of[c][(a, b)]
                            for a, b in zip(nodes, nodes[1:])]
                    path = [origin_edge] + mids + [dest_edge]
                else:
                    path = [origin_edge]
        self._cache[key] = path
        return path


@dataclass
class SimState:
    """Mutable simulation state; advance it with step()."""

    arrays: _NetworkArrays
    router: _Router
    schedules: dict[AgentClass, DemandSchedule]
    multiplier: float
    duration_s: float
    rng: np.random.Generator
    clock_s: float = 0.0
    accumulators: np.ndarray = None  # spawn accumulator per class
    spawned: np.ndarray = None
    arrived: np.ndarray = None
    spawn_by_interval: dict[AgentClass, list[int]] = field(default_factory=dict)
    speed_time_sum: np.ndarray = None  # integral of law speed over the window

    # agent arrays; rows [0:n) are live agents
    agent_cls: np.ndarray = None
    agent_edge: np.ndarray = None
    agent_pos: np.ndarray = None
    agent_pstart: np.ndarray = None
    agent_plen: np.ndarray = None
    agent_cursor: np.ndarray = None

    # flattened path pool
    pool: np.ndarray = None
    pool_len: int = 0

    @classmethod
    def create(cls, graph: NetworkGraph, schedules: dict[AgentClass, DemandSchedule],
               multiplier: float, duration_s: float, seed: int) -> "SimState":
        arrays = _NetworkArrays(graph)
        n_cls = len(ALL_CLASSES)
        state = cls(
            arrays=arrays,
            router=_Router(arrays),
            schedules=schedules,
            multiplier=multiplier,
            duration_s=duration_s,
            rng=np.random.default_rng(seed),
        )
        state.accumulators = np.zeros(n_cls)
        state.spawned = np.zeros(n_cls, dtype=np.int64)
        state.arrived = np.zeros(n_cls, dtype=np.int64)
        state.spawn_by_interval = {
            c: [0] * len(schedules[c].intervals) for c in schedules
        }
        state.speed_time_sum = np.zeros((len(arrays.edges), n_cls))
        state.agent_cls = np.zeros(0, dtype=np.int8)
        state.agent_edge = np.zeros(0, dtype=np.int32)
        state.agent_pos = np.zeros(0)
        state.agent_pstart = np.zeros(0, dtype=np.int64)
        state.agent_plen = np.zeros(0, dtype=np.int32)
        state.agent_cursor = np.zeros(0, dtype=np.int32)
        state.pool = np.zeros(1024, dtype=np.int32)
        return state

    @property
    def live_agents(self) -> int:
        return len(self.agent_cls)

    def counts(self) -> np.ndarray:
        """Per-edge per-class live agent counts."""
        E = len(self.arrays.edges)
        n_cls = len(ALL_CLASSES)
        if self.live_agents == 0:
            return np.zeros((E, n_cls))
        combined = self.agent_edge.astype(np.int64) * n_cls + self.agent_cls
        flat = np.bincount(combined, minlength=E * n_cls)
        return flat.reshape(E, n_cls).astype(float)

    def count_for(self, edge_id: str, cls: AgentClass) -> int:
        return int(self.counts()[self.arrays.edge_index[edge_id],
                                 CLASS_INDEX[cls]])

    def fingerprint(self) -> str:
        """Digest of the live state, for determinism checks."""
        import hashlib
        h = hashlib.sha256()
        h.update(np.float64(self.clock_s).tobytes())
        h.update(self.accumulators.tobytes())
        order = np.lexsort((self.agent_pos, self.agent_edge, self.agent_cls))
        for arr in (self.agent_cls, self.agent_edge, self.agent_pos,
                    self.agent_cursor):
            h.update(arr[order].tobytes())
        return h.hexdigest()

    def _append_pool(self, values: list[int]) -> int:
        start = self.pool_len
        needed = start + len(values)
        if needed > len(self.pool):
            new_size = max(needed, 2 * len(self.pool))
            new_pool = np.zeros(new_size, dtype=np.int32)
            new_pool[:start] = self.pool[:start]
            self.pool = new_pool
        self.pool[start:needed] = values
        self.pool_len = needed
        return start


def _spawn(state: SimState, dt: float) -> None:
    arrays = state.arrays
    new_rows = []
    for cls in ALL_CLASSES:
        c = CLASS_INDEX[cls]
        schedule = state.schedules.get(cls)
        if schedule is None:
            continue
        rate = spawn_rate_at(schedule, state.clock_s, state.multiplier)
        state.accumulators[c] += rate * dt
        n = int(state.accumulators[c])
        if n <= 0:
            continue
        state.accumulators[c] -= n
        pool_edges = arrays.allowed_edges[c]
        if len(pool_edges) == 0:
            continue
        origins = pool_edges[state.rng.integers(0, len(pool_edges), size=n)]
        dests = pool_edges[state.rng.integers(0, len(pool_edges), size=n)]
        interval_idx = _interval_index(schedule, state.clock_s)
        state.spawn_by_interval[cls][interval_idx] += n
        state.spawned[c] += n
        for o, d in zip(origins, dests):
            path = state.router.edge_path(c, int(o), int(d))
            start = state._append_pool(path)
            new_rows.append((c, path[0], start, len(path)))
    if new_rows:
        rows = np.array([(r[0], r[1], r[2], r[3]) for r in new_rows],
                        dtype=np.int64)
        state.agent_cls = np.concatenate([state.agent_cls,
                                          rows[:, 0].astype(np.int8)])
        state.agent_edge = np.concatenate([state.agent_edge,
                                           rows[:, 1].astype(np.int32)])
        state.agent_pos = np.concatenate([state.agent_pos,
                                          np.zeros(len(rows))])
        state.agent_pstart = np.concatenate([state.agent_pstart, rows[:, 2]])
        state.agent_plen = np.concatenate([state.agent_plen,
                                           rows[:, 3].astype(np.int32)])
        state.agent_cursor = np.concatenate([state.agent_cursor,
                                             np.zeros(len(rows), dtype=np.int32)])


def _interval_index(schedule: DemandSchedule, t: float) -> int:
    for i, (start, end, _) in enumerate(schedule.intervals):
        if start <= t < end:
            return i
    raise OutOfHorizon(f"t={t} outside schedule horizon")


def step(state: SimState, dt: float) -> SimState:
    """Advance the state by dt seconds: spawn, move, remove arrivals."""
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    if state.clock_s + dt > state.duration_s + 1e-9:
        raise OutOfHorizon("step would pass the scenario duration")
    _spawn(state, dt)

    arrays = state.arrays
    law_speeds = arrays.speed_matrix(state.counts())
    state.speed_time_sum += law_speeds * dt

    if state.live_agents:
        move_speeds = np.where(arrays.allowed,
                               np.maximum(law_speeds, MIN_MOVE_SPEED), 0.0)
        v = move_speeds[state.agent_edge, state.agent_cls]
        state.agent_pos = state.agent_pos + v * dt
        elen = arrays.length[state.agent_edge]

        arrived_mask = np.zeros(state.live_agents, dtype=bool)
        while True:
            over = np.nonzero((state.agent_pos >= elen) & ~arrived_mask)[0]
            if over.size == 0:
                break
            tau = (state.agent_pos[over] - elen[over]) / v[over]
            done = state.agent_cursor[over] >= state.agent_plen[over] - 1
            arrived_mask[over[done]] = True
            mov = over[~done]
            if mov.size:
                state.agent_cursor[mov] += 1
                nxt = state.pool[state.agent_pstart[mov] + state.agent_cursor[mov]]
                state.agent_edge[mov] = nxt
                v_new = move_speeds[nxt, state.agent_cls[mov]]
                state.agent_pos[mov] = v_new * tau[~done]
                v[mov] = v_new
                elen[mov] = arrays.length[nxt]

        if arrived_mask.any():
            per_class = np.bincount(state.agent_cls[arrived_mask],
                                    minlength=len(ALL_CLASSES))
            state.arrived += per_class
            keep = ~arrived_mask
            state.agent_cls = state.agent_cls[keep]
            state.agent_edge = state.agent_edge[keep]
            state.agent_pos = state.agent_pos[keep]
            state.agent_pstart = state.agent_pstart[keep]
            state.agent_plen = state.agent_plen[keep]
            state.agent_cursor = state.agent_cursor[keep]

    state.clock_s += dt
    return state


@dataclass
class SimulationSummary:
    duration_s: float
    window_s: int
    edge_count: int
    records_emitted: int
    wall_clock_s: float
    spawned: dict[str, int]
    arrived: dict[str, int]
    spawn_by_interval: dict[str, list[int]]


RecordSink = Callable[[EdgeTrafficRecord], None]


def window_records(state: SimState, window_start: int,
                   window_s: float) -> list[EdgeTrafficRecord]:
    """Aggregate the accumulated window into records, sorted by edge_id."""
    arrays = state.arrays
    means = state.speed_time_sum / window_s
    means = np.clip(means, 0.0, arrays.vfree)
    records = []
    for i in range(len(arrays.edges)):
        values = {}
        for cls in ALL_CLASSES:
            c = CLASS_INDEX[cls]
            values[cls] = float(means[i, c]) if arrays.allowed[i, c] else None
        records.append(EdgeTrafficRecord(
            edge_id=arrays.edge_ids[i],
            simulation_time=window_start,
            pedestrian_speed=values[AgentClass.PEDESTRIAN],
            bike_speed=values[AgentClass.BICYCLE],
            car_speed=values[AgentClass.CAR],
        ))
    state.speed_time_sum[:] = 0.0
    return records


def run_scenario(config: ScenarioConfig, sink: RecordSink,
                 graph: Optional[NetworkGraph] = None,
                 until_s: Optional[float] = None,
                 stop_requested: Optional[Callable[[], bool]] = None,
                 ) -> SimulationSummary:
    """Run a scenario, emitting one record per (window, edge) to the sink.

    ``until_s`` truncates the run to a whole number of windows (used by the
    benchmark to stop once a snapshot is available).
    """
    t0 = _time.perf_counter()
    graph = graph if graph is not None else build_graph(config)
    schedules = {c: s.clipped(config.duration_s)
                 for c, s in config.demand.items()}
    state = SimState.create(graph, schedules, config.demand_multiplier,
                            config.duration_s, config.seed)
    window = config.aggregation_window_s
    horizon = config.duration_s if until_s is None else min(
        config.duration_s, int(until_s))
    n_windows = max(0, int(horizon) // window)
    emitted = 0
    stopped = False
    for w in range(n_windows):
        for _ in range(window):
            step(state, 1.0)
        for record in window_records(state, w * window, window):
            try:
                sink(record)
            except Exception as exc:
                raise SinkError(f"record sink failed: {exc}") from exc
            emitted += 1
        if stop_requested is not None and stop_requested():
            stopped = True
            break
    return SimulationSummary(
        duration_s=state.clock_s if stopped else float(horizon),
        window_s=window,
        edge_count=len(state.arrays.edges),
        records_emitted=emitted,
        wall_clock_s=_time.perf_counter() - t0,
        spawned={c.value: int(state.spawned[CLASS_INDEX[c]])
                 for c in ALL_CLASSES},
        arrived={c.value: int(state.arrived[CLASS_INDEX[c]])
                 for c in ALL_CLASSES},
        spawn_by_interval={c.value: list(state.spawn_by_interval.get(c, []))
                           for c in ALL_CLASSES},
    )


def run_scenario_to_store(config: ScenarioConfig, store,
                          graph: Optional[NetworkGraph] = None,
                          until_s: Optional[float] = None,
                          channel_capacity: int = 64,
                          batch_size: int = 500,
                          stop_requested: Optional[Callable[[], bool]] = None,
                          on_window=None) -> SimulationSummary:
    """Producer/consumer pipeline: simulator -> bounded channel -> datastore.

    The consumer thread batches records per aggregation window and commits
    them atomically; backpressure blocks the simulation loop when the
    channel is full.
    """
    import threading

    from .channel import BoundedChannel
    from .store import IngestBatch

    channel = BoundedChannel(channel_capacity)
    consumer_error: list[Exception] = []

    def consume() -> None:
        pending = []

        def flush() -> None:
            nonlocal pending
            if pending:
                store.ingest(IngestBatch(tuple(pending)))
                if on_window is not None:
                    on_window(list(pending))
                pending = []

        try:
            for record in channel:
                if pending and (len(pending) >= batch_size
                                or record.simulation_time
                                != pending[0].simulation_time):
                    flush()
                pending.append(record)
            flush()
        except Exception as exc:  # surfaced to the producer thread
            consumer_error.append(exc)
            channel.close()

    thread = threading.Thread(target=consume, name="ingest-consumer")
    thread.start()
    try:
        summary = run_scenario(config, channel.put, graph=graph,
                               until_s=until_s, stop_requested=stop_requested)
    finally:
        channel.close()
        thread.join()
    if consumer_error:
        raise SinkError(f"ingestion failed: {consumer_error[0]}") \
            from consumer_error[0]
    return summary

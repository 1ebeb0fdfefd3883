"""Origin-destination benchmark across traffic levels.

Runs the simulator once per traffic level with a shared seed, snapshots
per-edge speeds at a fixed time, solves the same OD pairs under each
snapshot, and reports the extra-time distributions relative to the
lightest level.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NoRouteError
from .network import NetworkGraph, ScenarioConfig, TrafficLevel, build_graph
from .routing import (
    RouteRequest,
    TrafficSnapshot,
    expand_graph,
    solve_route,
)
from .simulation import run_scenario
from .stations import stations_from_spec
from .store import EdgeTrafficRecord

HISTOGRAM_BIN_S = 30.0

# Default snapshot inside the heavy-demand period of the 24 h profiles.
DEFAULT_SNAPSHOT_S = 40000


@dataclass
class BenchmarkReport:
    n_pairs: int
    seed: int
    snapshot_time_s: int
    levels: list[str]
    pairs: list[tuple[str, str]]
    times_s: dict[str, list[Optional[float]]]  # per level, aligned with pairs
    execution_times_ms: dict[str, list[Optional[float]]]
    excluded_pairs: int = 0
    extra_time_s: dict[str, list[float]] = field(default_factory=dict)
    mean_extra_s: dict[str, float] = field(default_factory=dict)
    histograms: dict[str, dict] = field(default_factory=dict)

    def finalize(self, baseline: str) -> None:
        included = [
            i for i in range(len(self.pairs))
            if all(self.times_s[level][i] is not None for level in self.levels)
        ]
        self.excluded_pairs = len(self.pairs) - len(included)
        base = self.times_s[baseline]
        for level in self.levels:
            if level == baseline:
                continue
            key = f"{level}-{baseline}"
            extra = [self.times_s[level][i] - base[i] for i in included]
            self.extra_time_s[key] = extra
            self.mean_extra_s[key] = float(np.mean(extra)) if extra else 0.0
            self.histograms[key] = _histogram(extra)

    def to_json(self) -> str:
        return json.dumps({
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "snapshot_time_s": self.snapshot_time_s,
            "levels": self.levels,
            "excluded_pairs": self.excluded_pairs,
            "mean_extra_s": self.mean_extra_s,
            "histograms": self.histograms,
            "pairs": [{"origin": o, "destination": d} for o, d in self.pairs],
            "times_s": self.times_s,
            "execution_times_ms": self.execution_times_ms,
            "extra_time_s": self.extra_time_s,
        }, indent=2)

    def to_csv(self) -> str:
        """Per-pair travel times, one row per OD pair."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["origin", "destination",
                         *(f"time_{level}_s" for level in self.levels)])
        for i, (o, d) in enumerate(self.pairs):
            writer.writerow([o, d, *(
                "" if self.times_s[level][i] is None
                else f"{self.times_s[level][i]:.3f}"
                for level in self.levels)])
        return buf.getvalue()


def _histogram(values: Sequence[float]) -> dict:
    if not values:
        return {"bin_width_s": HISTOGRAM_BIN_S, "start": 0.0, "counts": []}
    lo = math.floor(min(values) / HISTOGRAM_BIN_S) * HISTOGRAM_BIN_S
    hi = math.floor(max(values) / HISTOGRAM_BIN_S) * HISTOGRAM_BIN_S
    n_bins = int((hi - lo) / HISTOGRAM_BIN_S) + 1
    counts = [0] * n_bins
    for v in values:
        counts[int((v - lo) / HISTOGRAM_BIN_S)] += 1
    return {"bin_width_s": HISTOGRAM_BIN_S, "start": lo, "counts": counts}


def sample_od_pairs(graph: NetworkGraph, n_pairs: int,
                    seed: int) -> list[tuple[str, str]]:
    edge_ids = sorted(e.edge_id for e in graph.edges)
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < n_pairs:
        i, j = rng.integers(0, len(edge_ids), size=2)
        if i != j:
            pairs.append((edge_ids[int(i)], edge_ids[int(j)]))
    return pairs


def snapshot_for_level(config: ScenarioConfig, level: TrafficLevel,
                       graph: NetworkGraph,
                       snapshot_time_s: int) -> TrafficSnapshot:
    """Simulate the level up to the snapshot time and take the last window."""
    leveled = config.with_level(level)
    latest: dict[int, list[EdgeTrafficRecord]] = {}

    def sink(record: EdgeTrafficRecord) -> None:
        latest.setdefault(record.simulation_time, []).append(record)

    run_scenario(leveled, sink, graph=graph, until_s=snapshot_time_s)
    if not latest:
        raise NoRouteError("no completed window before snapshot time")
    last_window = max(latest)
    return TrafficSnapshot.from_records(latest[last_window])


def od_benchmark(config: ScenarioConfig,
                 n_pairs: int = 400,
                 levels: Sequence[TrafficLevel] = (
                     TrafficLevel.LOW, TrafficLevel.MEDIUM, TrafficLevel.HIGH),
                 seed: int = 42,
                 snapshot_time_s: Optional[int] = None,
                 max_transfers: int = 2,
                 graph: Optional[NetworkGraph] = None) -> BenchmarkReport:
    """Solve the same OD pairs under each traffic level's snapshot.

    Pairs infeasible under any level are excluded from the extra-time
    arrays and counted in the report.
    """
    graph = graph if graph is not None else build_graph(config)
    if snapshot_time_s is None:
        snapshot_time_s = min(config.duration_s, DEFAULT_SNAPSHOT_S)
    window = config.aggregation_window_s
    snapshot_time_s = max(window, (snapshot_time_s // window) * window)

    stations = stations_from_spec(graph, config.stations)
    pairs = sample_od_pairs(graph, n_pairs, seed)
    levels = list(levels)

    times: dict[str, list[Optional[float]]] = {l.value: [] for l in levels}
    exec_ms: dict[str, list[Optional[float]]] = {l.value: [] for l in levels}

    for level in levels:
        snapshot = snapshot_for_level(config, level, graph, snapshot_time_s)
        # arcs are request-independent apart from endpoints, so build once
        probe = RouteRequest(origin_edge=pairs[0][0],
                             destination_edge=pairs[0][1],
                             max_transfers=max_transfers)
        xg = expand_graph(graph, stations, probe, snapshot,
                          energy_params=config.energy)
        for origin, dest in pairs:
            request = RouteRequest(origin_edge=origin, destination_edge=dest,
                                   max_transfers=max_transfers)
            xg.origin_edge = origin
            xg.destination_edge = dest
            try:
                plan = solve_route(request, xg)
                times[level.value].append(plan.total_time_s)
                exec_ms[level.value].append(plan.execution_time_ms)
            except NoRouteError:
                times[level.value].append(None)
                exec_ms[level.value].append(None)

    report = BenchmarkReport(
        n_pairs=n_pairs,
        seed=seed,
        snapshot_time_s=snapshot_time_s,
        levels=[l.value for l in levels],
        pairs=pairs,
        times_s=times,
        execution_times_ms=exec_ms,
    )
    report.finalize(baseline=levels[0].value)
    return report

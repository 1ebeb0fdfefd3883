"""Road network, transport modes, demand schedules, and scenario loading.

The network file format is line-oriented JSON: one object per line, either
``{"type": "node", "id": ..., "x": ..., "y": ...}`` or
``{"type": "edge", "id": ..., "from": ..., "to": ..., "length_m": ...,
"free_flow_mps": {...}, "allowed_classes": [...], "jam_density": {...}}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import (
    DanglingEdgeError,
    InvalidDimension,
    ParseError,
    ValidationError,
)

FULL_DAY_S = 86400


class TransportMode(str, Enum):
    """Rider-facing travel modes offered by the platform."""

    WALK = "walk"
    EBIKE = "ebike"
    ESCOOTER = "escooter"
    ECAR = "ecar"


class AgentClass(str, Enum):
    """Simulated agent classes; each travel mode moves as one of these."""

    PEDESTRIAN = "pedestrian"
    BICYCLE = "bicycle"
    CAR = "car"


MODE_CLASS: dict[TransportMode, AgentClass] = {
    TransportMode.WALK: AgentClass.PEDESTRIAN,
    TransportMode.EBIKE: AgentClass.BICYCLE,
    TransportMode.ESCOOTER: AgentClass.BICYCLE,
    TransportMode.ECAR: AgentClass.CAR,
}

ALL_CLASSES = (AgentClass.PEDESTRIAN, AgentClass.BICYCLE, AgentClass.CAR)


class TrafficLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


DEFAULT_LEVEL_MULTIPLIERS: dict[TrafficLevel, float] = {
    TrafficLevel.LOW: 1.0,
    TrafficLevel.MEDIUM: 2.0,
    TrafficLevel.HIGH: 3.5,
}


@dataclass(frozen=True)
class Edge:
    """Directed road segment with per-class speed and capacity parameters."""

    edge_id: str
    from_node: str
    to_node: str
    length_m: float
    free_flow_mps: Mapping[AgentClass, float]
    allowed_classes: frozenset[AgentClass]
    jam_density: Mapping[AgentClass, float]

    def __post_init__(self) -> None:
        if self.length_m <= 0:
            raise ValidationError(f"edge {self.edge_id}: length_m must be > 0")
        for cls in self.allowed_classes:
            if self.free_flow_mps.get(cls, 0.0) <= 0:
                raise ValidationError(
                    f"edge {self.edge_id}: free_flow_mps[{cls.value}] must be > 0"
                )
            if self.jam_density.get(cls, 0.0) <= 0:
                raise ValidationError(
                    f"edge {self.edge_id}: jam_density[{cls.value}] must be > 0"
                )

    def allows(self, cls: AgentClass) -> bool:
        return cls in self.allowed_classes


@dataclass(frozen=True)
class NetworkGraph:
    """Directed multigraph over named nodes; may be disconnected."""

    nodes: frozenset[str]
    edges: tuple[Edge, ...]
    adjacency: Mapping[str, tuple[Edge, ...]]
    coordinates: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for e in self.edges:
            if e.edge_id in seen:
                raise ValidationError(f"duplicate edge_id {e.edge_id}")
            seen.add(e.edge_id)
            if e.from_node not in self.nodes:
                raise DanglingEdgeError(
                    f"edge {e.edge_id}: from_node {e.from_node!r} not in node set"
                )
            if e.to_node not in self.nodes:
                raise DanglingEdgeError(
                    f"edge {e.edge_id}: to_node {e.to_node!r} not in node set"
                )
        adj_ids = sorted(e.edge_id for out in self.adjacency.values() for e in out)
        if adj_ids != sorted(seen):
            raise ValidationError("adjacency inconsistent with edge collection")

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Edge],
        extra_nodes: Iterable[str] = (),
        coordinates: Optional[Mapping[str, tuple[float, float]]] = None,
    ) -> "NetworkGraph":
        edges = tuple(edges)
        nodes = set(extra_nodes)
        for e in edges:
            nodes.add(e.from_node)
            nodes.add(e.to_node)
        adjacency: dict[str, list[Edge]] = {n: [] for n in nodes}
        for e in edges:
            adjacency[e.from_node].append(e)
        return cls(
            nodes=frozenset(nodes),
            edges=edges,
            adjacency={n: tuple(out) for n, out in adjacency.items()},
            coordinates=dict(coordinates or {}),
        )

    def edge_by_id(self, edge_id: str) -> Edge:
        try:
            return self._index[edge_id]
        except AttributeError:
            object.__setattr__(self, "_index", {e.edge_id: e for e in self.edges})
            return self._index[edge_id]

    def has_edge(self, edge_id: str) -> bool:
        try:
            self.edge_by_id(edge_id)
            return True
        except KeyError:
            return False

    def outgoing(self, node: str) -> tuple[Edge, ...]:
        return self.adjacency.get(node, ())


@dataclass(frozen=True)
class DemandSchedule:
    """Piecewise-constant spawn periods covering [0, horizon) seconds.

    Intervals are half-open ``[start_s, end_s)`` and must tile the horizon
    without gaps or overlaps.
    """

    agent_class: AgentClass
    intervals: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ValidationError("demand schedule needs at least one interval")
        prev_end = 0.0
        for start, end, period in self.intervals:
            if start != prev_end:
                raise ValidationError(
                    f"demand[{self.agent_class.value}]: interval starting at {start} "
                    f"leaves a gap/overlap after {prev_end}"
                )
            if end <= start:
                raise ValidationError(
                    f"demand[{self.agent_class.value}]: empty interval at {start}"
                )
            if period <= 0:
                raise ValidationError(
                    f"demand[{self.agent_class.value}]: spawn_period_s must be > 0"
                )
            prev_end = end

    @property
    def horizon_s(self) -> float:
        return self.intervals[-1][1]

    def period_at(self, t: float) -> float:
        for start, end, period in self.intervals:
            if start <= t < end:
                return period
        raise KeyError(t)

    def clipped(self, duration_s: float) -> "DemandSchedule":
        """Schedule covering exactly [0, duration): truncate or extend the tail."""
        out: list[tuple[float, float, float]] = []
        for start, end, period in self.intervals:
            if start >= duration_s:
                break
            out.append((start, min(end, duration_s), period))
        if out and out[-1][1] < duration_s:
            start, _, period = out[-1]
            out[-1] = (start, duration_s, period)
        return DemandSchedule(self.agent_class, tuple(out))


# Bicycle/pedestrian spawn periods over a 24 h workday; cars default to the
# bicycle profile at half the period (denser traffic).
DEFAULT_BICYCLE_INTERVALS = ((0, 20000, 7.0), (20000, 62000, 1.5),
                             (62000, 70000, 2.5), (70000, 86400, 5.0))
DEFAULT_PEDESTRIAN_INTERVALS = ((0, 20000, 2.0), (20000, 62000, 0.75),
                                (62000, 70000, 0.8), (70000, 86400, 1.5))
DEFAULT_CAR_INTERVALS = tuple(
    (s, e, p * 0.5) for s, e, p in DEFAULT_BICYCLE_INTERVALS
)


def default_demand(duration_s: float) -> dict[AgentClass, DemandSchedule]:
    base = {
        AgentClass.PEDESTRIAN: DEFAULT_PEDESTRIAN_INTERVALS,
        AgentClass.BICYCLE: DEFAULT_BICYCLE_INTERVALS,
        AgentClass.CAR: DEFAULT_CAR_INTERVALS,
    }
    return {
        cls: DemandSchedule(cls, intervals).clipped(duration_s)
        for cls, intervals in base.items()
    }


@dataclass(frozen=True)
class StationPlacementSpec:
    count: int = 0
    strategy: str = "uniform_random"
    seed: int = 0
    capacity: int = 10
    explicit: tuple[dict, ...] = ()

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValidationError("stations.count must be >= 0")
        if self.strategy not in ("uniform_random", "degree_weighted"):
            raise ValidationError(f"stations.strategy unknown: {self.strategy!r}")
        if self.capacity < 1:
            raise ValidationError("stations.capacity must be >= 1")


@dataclass(frozen=True)
class EnergyModelParams:
    """Per-mode energy rates: E = (base + coeff * v^2) * km."""

    base_wh_per_km: Mapping[TransportMode, float] = field(
        default_factory=lambda: {
            TransportMode.WALK: 0.0,
            TransportMode.EBIKE: 10.0,
            TransportMode.ESCOOTER: 15.0,
            TransportMode.ECAR: 150.0,
        }
    )
    speed_coeff_wh_s2_per_km_m2: Mapping[TransportMode, float] = field(
        default_factory=lambda: {m: 0.0 for m in TransportMode}
    )

    def __post_init__(self) -> None:
        for name, table in (
            ("base_wh_per_km", self.base_wh_per_km),
            ("speed_coeff", self.speed_coeff_wh_s2_per_km_m2),
        ):
            for mode, v in table.items():
                if v < 0:
                    raise ValidationError(f"energy.{name}[{mode.value}] must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    network_path: str
    duration_s: int = FULL_DAY_S
    aggregation_window_s: int = 360
    traffic_level: TrafficLevel = TrafficLevel.LOW
    demand: Mapping[AgentClass, DemandSchedule] = field(default_factory=dict)
    stations: StationPlacementSpec = field(default_factory=StationPlacementSpec)
    energy: EnergyModelParams = field(default_factory=EnergyModelParams)
    seed: int = 0
    level_multipliers: Mapping[TrafficLevel, float] = field(
        default_factory=lambda: dict(DEFAULT_LEVEL_MULTIPLIERS)
    )

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValidationError("duration_s must be > 0")
        if self.aggregation_window_s <= 0:
            raise ValidationError("aggregation_window_s must be > 0")
        if self.duration_s % self.aggregation_window_s != 0:
            raise ValidationError(
                "aggregation_window_s must divide duration_s evenly"
            )
        mults = self.level_multipliers
        if not (0 < mults[TrafficLevel.LOW] < mults[TrafficLevel.MEDIUM]
                < mults[TrafficLevel.HIGH]):
            raise ValidationError(
                "level_multipliers must satisfy 0 < low < medium < high"
            )
        for cls, schedule in self.demand.items():
            if schedule.horizon_s != self.duration_s:
                raise ValidationError(
                    f"demand[{cls.value}] must cover [0, {self.duration_s})"
                )

    @property
    def demand_multiplier(self) -> float:
        return self.level_multipliers[self.traffic_level]

    def with_level(self, level: TrafficLevel) -> "ScenarioConfig":
        return ScenarioConfig(
            network_path=self.network_path,
            duration_s=self.duration_s,
            aggregation_window_s=self.aggregation_window_s,
            traffic_level=level,
            demand=self.demand,
            stations=self.stations,
            energy=self.energy,
            seed=self.seed,
            level_multipliers=self.level_multipliers,
        )


_SCENARIO_KEYS = {
    "network", "duration_s", "aggregation_window_s", "traffic_level",
    "demand", "stations", "energy", "seed", "traffic_multipliers",
}
_STATION_KEYS = {"count", "strategy", "seed", "capacity", "explicit"}


def parse_scenario(raw: Mapping, base_dir: Optional[Path] = None) -> ScenarioConfig:
    """Validate a scenario mapping; reject unknown keys, fill defaults."""
    if not isinstance(raw, Mapping):
        raise ValidationError("scenario must be a JSON object")
    unknown = set(raw) - _SCENARIO_KEYS
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    if "network" not in raw:
        raise ValidationError("missing required key: network")
    network = str(raw["network"])
    if base_dir is not None and not Path(network).is_absolute():
        network = str(base_dir / network)

    duration = _int_field(raw, "duration_s", FULL_DAY_S)
    window = _int_field(raw, "aggregation_window_s", 360)

    level_raw = raw.get("traffic_level", "low")
    try:
        level = TrafficLevel(str(level_raw).lower())
    except ValueError:
        raise ValidationError(f"traffic_level must be low/medium/high, got {level_raw!r}")

    mults = dict(DEFAULT_LEVEL_MULTIPLIERS)
    for key, value in raw.get("traffic_multipliers", {}).items():
        try:
            mults[TrafficLevel(key.lower())] = float(value)
        except ValueError:
            raise ValidationError(f"traffic_multipliers key unknown: {key!r}")

    demand = default_demand(duration)
    for key, intervals in raw.get("demand", {}).items():
        try:
            cls = AgentClass(key.lower())
        except ValueError:
            raise ValidationError(f"demand class unknown: {key!r}")
        try:
            parsed = tuple((float(s), float(e), float(p)) for s, e, p in intervals)
        except (TypeError, ValueError):
            raise ValidationError(
                f"demand[{key}] intervals must be [start_s, end_s, spawn_period_s] triples"
            )
        demand[cls] = DemandSchedule(cls, parsed)

    st_raw = raw.get("stations", {})
    if not isinstance(st_raw, Mapping):
        raise ValidationError("stations must be an object")
    unknown = set(st_raw) - _STATION_KEYS
    if unknown:
        raise ValidationError(f"unknown stations keys: {sorted(unknown)}")
    stations = StationPlacementSpec(
        count=int(st_raw.get("count", 0)),
        strategy=str(st_raw.get("strategy", "uniform_random")),
        seed=int(st_raw.get("seed", 0)),
        capacity=int(st_raw.get("capacity", 10)),
        explicit=tuple(st_raw.get("explicit", ())),
    )

    energy = _parse_energy(raw.get("energy", {}))
    seed = _int_field(raw, "seed", 0)

    return ScenarioConfig(
        network_path=network,
        duration_s=duration,
        aggregation_window_s=window,
        traffic_level=level,
        demand=demand,
        stations=stations,
        energy=energy,
        seed=seed,
        level_multipliers=mults,
    )


def _int_field(raw: Mapping, key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or int(value) != value:
        raise ValidationError(f"{key} must be an integer")
    return int(value)


def _parse_energy(raw: Mapping) -> EnergyModelParams:
    if not isinstance(raw, Mapping):
        raise ValidationError("energy must be an object")
    base = dict(EnergyModelParams().base_wh_per_km)
    coeff = dict(EnergyModelParams().speed_coeff_wh_s2_per_km_m2)
    for key, entry in raw.items():
        try:
            mode = TransportMode(key.lower())
        except ValueError:
            raise ValidationError(f"energy mode unknown: {key!r}")
        if not isinstance(entry, Mapping):
            raise ValidationError(f"energy[{key}] must be an object")
        unknown = set(entry) - {"base_wh_per_km", "speed_coeff"}
        if unknown:
            raise ValidationError(f"unknown energy keys for {key}: {sorted(unknown)}")
        if "base_wh_per_km" in entry:
            base[mode] = float(entry["base_wh_per_km"])
        if "speed_coeff" in entry:
            coeff[mode] = float(entry["speed_coeff"])
    return EnergyModelParams(base_wh_per_km=base, speed_coeff_wh_s2_per_km_m2=coeff)


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return parse_scenario(raw, base_dir=path.parent)


# --- network files ---------------------------------------------------------

def parse_network_text(text: str) -> NetworkGraph:
    nodes: set[str] = set()
    coords: dict[str, tuple[float, float]] = {}
    edges: list[Edge] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"network line {lineno}: invalid JSON: {exc}") from exc
        kind = rec.get("type")
        if kind == "node":
            nodes.add(str(rec["id"]))
            if "x" in rec and "y" in rec:
                coords[str(rec["id"])] = (float(rec["x"]), float(rec["y"]))
        elif kind == "edge":
            try:
                edges.append(_edge_from_record(rec))
            except KeyError as exc:
                raise ParseError(f"network line {lineno}: missing key {exc}") from exc
        else:
            raise ParseError(f"network line {lineno}: unknown record type {kind!r}")
    for e in edges:
        if e.from_node not in nodes or e.to_node not in nodes:
            raise DanglingEdgeError(
                f"edge {e.edge_id} references a node outside the node set"
            )
    return NetworkGraph.from_edges(edges, extra_nodes=nodes, coordinates=coords)


def _edge_from_record(rec: Mapping) -> Edge:
    allowed = frozenset(AgentClass(c) for c in rec["allowed_classes"])
    speeds = {AgentClass(k): float(v) for k, v in rec["free_flow_mps"].items()}
    jam = {AgentClass(k): float(v) for k, v in rec["jam_density"].items()}
    return Edge(
        edge_id=str(rec["id"]),
        from_node=str(rec["from"]),
        to_node=str(rec["to"]),
        length_m=float(rec["length_m"]),
        free_flow_mps=speeds,
        allowed_classes=allowed,
        jam_density=jam,
    )


def build_graph(config: ScenarioConfig) -> NetworkGraph:
    """Parse the scenario's network file into a validated directed graph."""
    path = Path(config.network_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read network file {path}: {exc}") from exc
    return parse_network_text(text)


# --- synthetic grid generator ----------------------------------------------

# Calibrated so the walk layer stays subcritical at the highest demand
# multiplier (routes always exist) while central bike/car corridors congest
# enough to separate the traffic levels.
GRID_JAM_DENSITY = {
    AgentClass.PEDESTRIAN: 2.0,
    AgentClass.BICYCLE: 0.35,
    AgentClass.CAR: 0.30,
}
GRID_SPEED_RANGES = {
    AgentClass.PEDESTRIAN: (1.2, 1.5),
    AgentClass.BICYCLE: (3.5, 5.5),
    AgentClass.CAR: (8.0, 14.0),
}


def generate_synthetic_grid(n: int, m: int, seed: int) -> str:
    """Deterministic n x m grid network as JSON-lines text.

    Each undirected grid link becomes two directed edges sharing one
    randomized length (50-300 m) and per-class free-flow speeds; the same
    seed yields byte-identical output.
    """
    if n < 2 or m < 2:
        raise InvalidDimension(f"grid dimensions must be >= 2, got {n}x{m}")
    rng = np.random.default_rng(seed)
    lines: list[str] = []
    for r in range(n):
        for c in range(m):
            lines.append(json.dumps(
                {"type": "node", "id": f"N{r}x{c}", "x": float(c * 200),
                 "y": float(r * 200)},
                separators=(", ", ": ")))

    links: list[tuple[str, str]] = []
    for r in range(n):
        for c in range(m):
            if c + 1 < m:
                links.append((f"N{r}x{c}", f"N{r}x{c + 1}"))
            if r + 1 < n:
                links.append((f"N{r}x{c}", f"N{r + 1}x{c}"))

    idx = 1
    for u, v in links:
        length = round(float(rng.uniform(50.0, 300.0)), 2)
        speeds = {
            cls.value: round(float(rng.uniform(*GRID_SPEED_RANGES[cls])), 3)
            for cls in ALL_CLASSES
        }
        jam = {cls.value: GRID_JAM_DENSITY[cls] for cls in ALL_CLASSES}
        for a, b in ((u, v), (v, u)):
            lines.append(json.dumps(
                {"type": "edge", "id": f"E{idx:04d}", "from": a, "to": b,
                 "length_m": length, "free_flow_mps": speeds,
                 "allowed_classes": [c.value for c in ALL_CLASSES],
                 "jam_density": jam},
                separators=(", ", ": ")))
            idx += 1
    return "\n".join(lines) + "\n"


def write_synthetic_grid(path: str | Path, n: int, m: int, seed: int) -> Path:
    path = Path(path)
    path.write_text(generate_synthetic_grid(n, m, seed), encoding="utf-8")
    return path

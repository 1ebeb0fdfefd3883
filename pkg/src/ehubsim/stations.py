"""Docking stations: placement, vehicle inventory, pickup/dropoff."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import NotAvailable, StationFull, TooManyStations, ValidationError
from .network import NetworkGraph, StationPlacementSpec, TransportMode

VEHICLE_TYPES = (TransportMode.EBIKE, TransportMode.ESCOOTER, TransportMode.ECAR)

# Seeded per station unless the scenario overrides it.
DEFAULT_INVENTORY_MIX = {
    TransportMode.EBIKE: 3,
    TransportMode.ESCOOTER: 3,
    TransportMode.ECAR: 1,
}


@dataclass(frozen=True)
class VehicleUnit:
    vehicle_id: str
    vehicle_type: TransportMode
    battery_level: float  # percent
    battery_capacity_wh: float

    def __post_init__(self) -> None:
        if self.vehicle_type == TransportMode.WALK:
            raise ValidationError("vehicle_type cannot be walk")
        if not 0.0 <= self.battery_level <= 100.0:
            raise ValidationError(
                f"vehicle {self.vehicle_id}: battery_level must be in [0, 100]"
            )
        if self.battery_capacity_wh <= 0:
            raise ValidationError(
                f"vehicle {self.vehicle_id}: battery_capacity_wh must be > 0"
            )

    def drained(self, energy_wh: float) -> "VehicleUnit":
        pct = 100.0 * energy_wh / self.battery_capacity_wh
        return replace(self, battery_level=max(0.0, self.battery_level - pct))


DEFAULT_CAPACITY_WH = {
    TransportMode.EBIKE: 500.0,
    TransportMode.ESCOOTER: 450.0,
    TransportMode.ECAR: 40000.0,
}


@dataclass
class Station:
    """Dock cluster on one edge. Mutate only through apply_transaction."""

    station_id: str
    edge_id: str
    capacity: int
    inventory: list[VehicleUnit] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValidationError(f"station {self.station_id}: capacity must be >= 1")
        if len(self.inventory) > self.capacity:
            raise ValidationError(
                f"station {self.station_id}: inventory exceeds capacity"
            )

    def free_docks(self) -> int:
        return self.capacity - len(self.inventory)


def place_stations(
    graph: NetworkGraph,
    count: int,
    strategy: str = "uniform_random",
    seed: int = 0,
    capacity: int = 10,
    inventory_mix: Optional[Mapping[TransportMode, int]] = None,
) -> list[Station]:
    """Place ``count`` stations on distinct edges, deterministically per seed.

    ``degree_weighted`` favors edges whose endpoints touch many edges, so
    hub edges of star-like networks are selected most often.
    """
    if count < 0:
        raise TooManyStations("count must be >= 0")
    if count > len(graph.edges):
        raise TooManyStations(
            f"cannot place {count} stations on {len(graph.edges)} edges"
        )
    edges = sorted(graph.edges, key=lambda e: e.edge_id)
    rng = np.random.default_rng(seed)
    if strategy == "uniform_random":
        weights = np.ones(len(edges))
    elif strategy == "degree_weighted":
        degree = {n: 0 for n in graph.nodes}
        for e in graph.edges:
            degree[e.from_node] += 1
            degree[e.to_node] += 1
        weights = np.array(
            [degree[e.from_node] + degree[e.to_node] for e in edges], dtype=float
        )
    else:
        raise ValidationError(f"unknown placement strategy {strategy!r}")
    probs = weights / weights.sum()
    chosen = rng.choice(len(edges), size=count, replace=False, p=probs)

    mix = dict(inventory_mix) if inventory_mix is not None else dict(DEFAULT_INVENTORY_MIX)
    stations = []
    for i, edge_idx in enumerate(chosen, start=1):
        sid = f"ST{i:03d}"
        inventory = []
        for vtype in VEHICLE_TYPES:
            for k in range(mix.get(vtype, 0)):
                inventory.append(VehicleUnit(
                    vehicle_id=f"{sid}-{vtype.value}-{k + 1}",
                    vehicle_type=vtype,
                    battery_level=round(float(rng.uniform(60.0, 100.0)), 1),
                    battery_capacity_wh=DEFAULT_CAPACITY_WH[vtype],
                ))
        if len(inventory) > capacity:
            raise ValidationError("inventory mix exceeds station capacity")
        stations.append(Station(
            station_id=sid,
            edge_id=edges[edge_idx].edge_id,
            capacity=capacity,
            inventory=inventory,
        ))
    return stations


def stations_from_spec(graph: NetworkGraph, spec: StationPlacementSpec) -> list[Station]:
    """Materialize the scenario's station set (explicit list or placement)."""
    if spec.explicit:
        stations = []
        for raw in spec.explicit:
            inventory = []
            for i, item in enumerate(raw.get("inventory", ()), start=1):
                vtype = TransportMode(item["type"])
                inventory.append(VehicleUnit(
                    vehicle_id=item.get("vehicle_id", f"{raw['station_id']}-{vtype.value}-{i}"),
                    vehicle_type=vtype,
                    battery_level=float(item.get("battery", 100.0)),
                    battery_capacity_wh=float(
                        item.get("capacity_wh", DEFAULT_CAPACITY_WH[vtype])
                    ),
                ))
            if not graph.has_edge(str(raw["edge_id"])):
                raise ValidationError(
                    f"station {raw['station_id']}: edge {raw['edge_id']} not in network"
                )
            stations.append(Station(
                station_id=str(raw["station_id"]),
                edge_id=str(raw["edge_id"]),
                capacity=int(raw.get("capacity", spec.capacity)),
                inventory=inventory,
            ))
        return stations
    return place_stations(
        graph, spec.count, strategy=spec.strategy, seed=spec.seed,
        capacity=spec.capacity,
    )


def query_availability(
    station: Station, vehicle_type: TransportMode, min_battery: float = 0.0
) -> int:
    """Number of docked units of the type at or above the battery threshold."""
    return sum(
        1 for u in station.inventory
        if u.vehicle_type == vehicle_type and u.battery_level >= min_battery
    )


def pick_unit(
    station: Station, vehicle_type: TransportMode, min_battery: float = 0.0
) -> VehicleUnit:
    """Deterministic pickup choice: highest battery, then vehicle_id."""
    candidates = [
        u for u in station.inventory
        if u.vehicle_type == vehicle_type and u.battery_level >= min_battery
    ]
    if not candidates:
        raise NotAvailable(
            f"station {station.station_id}: no {vehicle_type.value} "
            f"with battery >= {min_battery}"
        )
    return max(candidates, key=lambda u: (u.battery_level, u.vehicle_id))


def apply_transaction(station: Station, op: str, unit: VehicleUnit) -> Station:
    """Apply a pickup or dropoff; mutates and returns the station.

    The caller must serialize transactions per station (single writer).
    """
    if op == "pickup":
        for i, docked in enumerate(station.inventory):
            if docked.vehicle_id == unit.vehicle_id:
                del station.inventory[i]
                return station
        raise NotAvailable(
            f"station {station.station_id}: vehicle {unit.vehicle_id} not docked"
        )
    if op == "dropoff":
        if station.free_docks() < 1:
            raise StationFull(f"station {station.station_id}: no free dock")
        if any(d.vehicle_id == unit.vehicle_id for d in station.inventory):
            raise ValidationError(
                f"vehicle {unit.vehicle_id} already docked at {station.station_id}"
            )
        station.inventory.append(unit)
        return station
    raise ValidationError(f"unknown transaction op {op!r}")


def station_rows(stations: Iterable[Station]) -> list[tuple]:
    """Flatten stations into (station_id, edge_id, vehicle_id, type, battery) rows."""
    rows = []
    for st in stations:
        for u in sorted(st.inventory, key=lambda u: u.vehicle_id):
            rows.append((st.station_id, st.edge_id, u.vehicle_id,
                         u.vehicle_type.value, u.battery_level))
    return rows


def total_inventory(stations: Sequence[Station]) -> dict[str, str]:
    """vehicle_id -> station_id map, for conservation checks."""
    out: dict[str, str] = {}
    for st in stations:
        for u in st.inventory:
            out[u.vehicle_id] = st.station_id
    return out

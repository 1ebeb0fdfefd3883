"""Shared e-mobility platform: simulation, routing, storage, and
retrieval-augmented question answering over the stored tables."""

from .network import (
    AgentClass,
    DemandSchedule,
    Edge,
    EnergyModelParams,
    NetworkGraph,
    ScenarioConfig,
    TrafficLevel,
    TransportMode,
    build_graph,
    generate_synthetic_grid,
    load_scenario,
)
from .routing import (
    ModeLeg,
    RoutePlan,
    RouteRequest,
    TrafficSnapshot,
    brute_force_oracle,
    energy_cost,
    expand_graph,
    solve_route,
)
from .simulation import SimState, edge_speed, run_scenario, spawn_rate_at, step
from .stations import Station, VehicleUnit, apply_transaction, place_stations, query_availability
from .store import Datastore, EdgeTrafficRecord, IngestBatch, ResultTable

__version__ = "0.1.0"

__all__ = [
    "AgentClass", "DemandSchedule", "Edge", "EnergyModelParams",
    "NetworkGraph", "ScenarioConfig", "TrafficLevel", "TransportMode",
    "build_graph", "generate_synthetic_grid", "load_scenario",
    "ModeLeg", "RoutePlan", "RouteRequest", "TrafficSnapshot",
    "brute_force_oracle", "energy_cost", "expand_graph", "solve_route",
    "SimState", "edge_speed", "run_scenario", "spawn_rate_at", "step",
    "Station", "VehicleUnit", "apply_transaction", "place_stations",
    "query_availability",
    "Datastore", "EdgeTrafficRecord", "IngestBatch", "ResultTable",
    "__version__",
]

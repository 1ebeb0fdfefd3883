"""Energy- and transfer-constrained multi-modal routing on a small fixture.

A one-way chain where an e-scooter shortcut beats walking: shows the
mode-expanded graph, the optimal plan, what happens when constraints
tighten, and committing the trip (station inventories change and a
user_paths row is written).
"""

import json
from pathlib import Path

from ehubsim.network import StationPlacementSpec, TransportMode, parse_network_text
from ehubsim.routing import (
    RouteRequest,
    TrafficSnapshot,
    brute_force_oracle,
    commit_route,
    expand_graph,
    solve_route,
)
from ehubsim.stations import query_availability, stations_from_spec
from ehubsim.store import Datastore

fixtures = Path(__file__).resolve().parent.parent / "data" / "fixtures"
graph = parse_network_text((fixtures / "route_network.jsonl").read_text())
spec = StationPlacementSpec(explicit=tuple(json.loads(
    (fixtures / "route_stations.json").read_text())))
stations = stations_from_spec(graph, spec)

request = RouteRequest(origin_edge="E1", destination_edge="E4")
snapshot = TrafficSnapshot.free_flow(graph)
xg = expand_graph(graph, stations, request, snapshot)

print(f"expanded graph: {len(xg.movement_arcs())} movement arcs, "
      f"{len(xg.transfer_arcs())} transfer arcs at stations "
      f"{sorted(xg.station_edges)}")

plan = solve_route(request, xg)
print(f"\noptimal plan ({plan.total_time_s:.0f} s, "
      f"{plan.transfers} transfers, solved in {plan.execution_time_ms:.2f} ms):")
for leg in plan.legs:
    print(f"  {leg.mode.value:>9}: {'-'.join(leg.edge_ids)} "
          f"({leg.leg_time_s:.0f} s, {leg.leg_energy_wh:.1f} Wh)")

oracle = brute_force_oracle(request, xg)
print(f"exhaustive oracle agrees: "
      f"{plan.canonical_dict() == oracle.canonical_dict()}")

for label, tightened in [
    ("max_transfers=0", RouteRequest("E1", "E4", max_transfers=0)),
    ("scooter budget 1 Wh", RouteRequest(
        "E1", "E4", energy_budget_wh={TransportMode.ESCOOTER: 1.0})),
]:
    alt = solve_route(tightened, expand_graph(graph, stations, tightened,
                                              snapshot))
    modes = "+".join(leg.mode.value for leg in alt.legs)
    print(f"under {label}: {modes} in {alt.total_time_s:.0f} s")

store = Datastore()
store.init_schema()
pickup = next(s for s in stations if s.edge_id == "E2")
print(f"\nscooters at {pickup.station_id} before commit: "
      f"{query_availability(pickup, TransportMode.ESCOOTER)}")
record = commit_route(plan, stations, store)
print(f"scooters at {pickup.station_id} after commit:  "
      f"{query_availability(pickup, TransportMode.ESCOOTER)}")
print(f"user_paths row {record.path_id}: {record.optimal_path_sequence}")

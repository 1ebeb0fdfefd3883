import numpy as np
import pytest

from ehubsim.errors import NoRouteError, NotAvailable
from ehubsim.network import (
    AgentClass,
    Edge,
    EnergyModelParams,
    NetworkGraph,
    TransportMode,
)
from ehubsim.routing import (
    RouteRequest,
    TrafficSnapshot,
    brute_force_oracle,
    commit_route,
    energy_cost,
    expand_graph,
    solve_route,
    validate_plan,
)
from ehubsim.stations import Station, VehicleUnit

WALK = TransportMode.WALK
ESCOOTER = TransportMode.ESCOOTER
EBIKE = TransportMode.EBIKE
ECAR = TransportMode.ECAR

CAPACITY_WH = {EBIKE: 500.0, ESCOOTER: 450.0, ECAR: 40000.0}


def km_edge(eid, length_km=1.0):
    return Edge(eid, "A", "B", length_km * 1000.0,
                {AgentClass.PEDESTRIAN: 1.4, AgentClass.CAR: 10.0,
                 AgentClass.BICYCLE: 4.0},
                frozenset(AgentClass),
                {c: 1.0 for c in AgentClass})


class TestEnergyCost:
    def test_walk_is_free(self):
        assert energy_cost(km_edge("E"), WALK, 1.4, EnergyModelParams()) == 0.0

    def test_car_base_rate(self):
        assert energy_cost(km_edge("E"), ECAR, 10.0, EnergyModelParams()) == \
            pytest.approx(150.0)

    def test_ebike_scales_with_length(self):
        assert energy_cost(km_edge("E", 2.5), EBIKE, 4.0,
                           EnergyModelParams()) == pytest.approx(25.0)

    def test_quadratic_term(self):
        params = EnergyModelParams(
            base_wh_per_km={m: 0.0 for m in TransportMode},
            speed_coeff_wh_s2_per_km_m2={**{m: 0.0 for m in TransportMode},
                                         ECAR: 1.0})
        assert energy_cost(km_edge("E"), ECAR, 10.0, params) == \
            pytest.approx(100.0)


class TestExpandGraph:
    def test_walk_only_isomorphic_to_walkable_subgraph(self, route_graph,
                                                       route_stations):
        req = RouteRequest("E1", "E4", modes=frozenset({WALK}))
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        arcs = xg.movement_arcs()
        # every arc targets a walkable edge; adjacency mirrored exactly
        expected = set()
        for e1 in route_graph.edges:
            for e2 in route_graph.outgoing(e1.to_node):
                if e2.allows(AgentClass.PEDESTRIAN):
                    expected.add((e1.edge_id, e2.edge_id))
        assert {(a, arc.to_edge) for a, _, arc in arcs} == expected
        assert xg.transfer_arcs() == []  # no transfers in a single layer

    def test_single_station_two_transfer_arcs(self, route_graph,
                                              route_stations):
        req = RouteRequest("E1", "E4", modes=frozenset({WALK, ESCOOTER}))
        xg = expand_graph(route_graph, route_stations[:1], req,
                          TrafficSnapshot.free_flow(route_graph))
        assert xg.transfer_arcs() == [
            ("E2", ESCOOTER, WALK), ("E2", WALK, ESCOOTER)]

    def test_zero_speed_edge_omitted(self, route_graph, route_stations):
        table = {e.edge_id: {c: (e.free_flow_mps[c] if e.allows(c) else None)
                             for c in AgentClass}
                 for e in route_graph.edges}
        table["E3"][AgentClass.PEDESTRIAN] = 0.0
        req = RouteRequest("E1", "E4", modes=frozenset({WALK}))
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot(table))
        assert all(arc.to_edge != "E3" for _, _, arc in xg.movement_arcs())


class TestSolveRoute:
    def test_same_edge_zero_plan(self, route_graph, route_stations):
        req = RouteRequest("E2", "E2")
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        assert plan.total_time_s == 0.0
        assert plan.legs == ()
        assert plan.transfers == 0

    def test_disconnected_walk_only(self):
        e1 = Edge("E1", "A", "B", 100,
                  {AgentClass.PEDESTRIAN: 1.4},
                  frozenset({AgentClass.PEDESTRIAN}),
                  {AgentClass.PEDESTRIAN: 2.0})
        e2 = Edge("E2", "C", "D", 100,
                  {AgentClass.PEDESTRIAN: 1.4},
                  frozenset({AgentClass.PEDESTRIAN}),
                  {AgentClass.PEDESTRIAN: 2.0})
        graph = NetworkGraph.from_edges([e1, e2])
        req = RouteRequest("E1", "E2", modes=frozenset({WALK}))
        xg = expand_graph(graph, [], req, TrafficSnapshot.free_flow(graph))
        with pytest.raises(NoRouteError):
            solve_route(req, xg)
        with pytest.raises(NoRouteError):
            brute_force_oracle(req, xg)

    def test_fixture_scooter_beats_walking(self, route_graph, route_stations):
        req = RouteRequest("E1", "E4", max_transfers=2)
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        oracle = brute_force_oracle(req, xg)
        assert plan.total_time_s == oracle.total_time_s
        assert plan.canonical_dict() == oracle.canonical_dict()
        assert [leg.mode for leg in plan.legs] == [WALK, ESCOOTER, WALK]
        assert plan.total_time_s == pytest.approx(600.0)
        validate_plan(plan, req, xg)

    def test_transfer_cap_forces_walking(self, route_graph, route_stations):
        req = RouteRequest("E1", "E4", max_transfers=0)
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        assert [leg.mode for leg in plan.legs] == [WALK]
        assert plan.total_time_s == pytest.approx(1100.0)

    def test_energy_budget_forces_walking(self, route_graph, route_stations):
        req = RouteRequest("E1", "E4", energy_budget_wh={ESCOOTER: 1.0})
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        assert [leg.mode for leg in plan.legs] == [WALK]

    def test_infeasible_energy_no_walk_connectivity(self):
        # motorized-only edge between walk components: budget 0 blocks it
        edges = [
            Edge("E1", "A", "B", 100, {AgentClass.PEDESTRIAN: 1.4,
                                       AgentClass.BICYCLE: 4.0},
                 frozenset({AgentClass.PEDESTRIAN, AgentClass.BICYCLE}),
                 {AgentClass.PEDESTRIAN: 2.0, AgentClass.BICYCLE: 0.5}),
            Edge("E2", "B", "C", 100, {AgentClass.BICYCLE: 4.0},
                 frozenset({AgentClass.BICYCLE}),
                 {AgentClass.BICYCLE: 0.5}),
            Edge("E3", "C", "D", 100, {AgentClass.PEDESTRIAN: 1.4,
                                       AgentClass.BICYCLE: 4.0},
                 frozenset({AgentClass.PEDESTRIAN, AgentClass.BICYCLE}),
                 {AgentClass.PEDESTRIAN: 2.0, AgentClass.BICYCLE: 0.5}),
        ]
        graph = NetworkGraph.from_edges(edges)
        stations = [
            Station("S1", "E1", capacity=4, inventory=[
                VehicleUnit("V1", EBIKE, 90.0, 500.0)]),
            Station("S2", "E3", capacity=4, inventory=[]),
        ]
        req_ok = RouteRequest("E1", "E3", modes=frozenset({WALK, EBIKE}))
        xg = expand_graph(graph, stations, req_ok,
                          TrafficSnapshot.free_flow(graph))
        plan = solve_route(req_ok, xg)
        assert any(leg.mode == EBIKE for leg in plan.legs)

        req_blocked = RouteRequest("E1", "E3", modes=frozenset({WALK, EBIKE}),
                                   energy_budget_wh={EBIKE: 0.0})
        xg2 = expand_graph(graph, stations, req_blocked,
                           TrafficSnapshot.free_flow(graph))
        with pytest.raises(NoRouteError):
            solve_route(req_blocked, xg2)
        with pytest.raises(NoRouteError):
            brute_force_oracle(req_blocked, xg2)

    def test_monotonicity_speed_increase_never_slower(self, route_graph,
                                                      route_stations):
        req = RouteRequest("E1", "E4")
        base_table = {
            e.edge_id: {c: (e.free_flow_mps[c] if e.allows(c) else None)
                        for c in AgentClass} for e in route_graph.edges}
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot(base_table))
        base_time = solve_route(req, xg).total_time_s
        for eid in ("E2", "E3", "E4"):
            table = {k: dict(v) for k, v in base_table.items()}
            table[eid][AgentClass.PEDESTRIAN] *= 2.0
            xg2 = expand_graph(route_graph, route_stations, req,
                               TrafficSnapshot(table))
            assert solve_route(req, xg2).total_time_s <= base_time + 1e-9

    def test_deterministic_plan_bytes(self, route_graph, route_stations):
        import json
        req = RouteRequest("E1", "E4")
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        blobs = {json.dumps(solve_route(req, xg).canonical_dict(),
                            sort_keys=True) for _ in range(3)}
        assert len(blobs) == 1


def random_instance(rng):
    """Connected-ish random instance with <= 12 edges and binding budgets."""
    n_nodes = int(rng.integers(3, 7))
    nodes = [f"N{i}" for i in range(n_nodes)]
    edges = []
    eid = 0

    def add_edge(u, v):
        nonlocal eid
        allowed = {AgentClass.PEDESTRIAN}
        if rng.random() < 0.7:
            allowed.add(AgentClass.BICYCLE)
        if rng.random() < 0.5:
            allowed.add(AgentClass.CAR)
        speeds = {AgentClass.PEDESTRIAN: float(rng.uniform(1.0, 1.5)),
                  AgentClass.BICYCLE: float(rng.uniform(3.0, 6.0)),
                  AgentClass.CAR: float(rng.uniform(7.0, 14.0))}
        edges.append(Edge(
            f"E{eid:02d}", u, v, float(round(rng.uniform(50, 400), 1)),
            {c: speeds[c] for c in allowed}, frozenset(allowed),
            {c: 0.5 for c in allowed}))
        eid += 1

    # backbone chain keeps most instances feasible
    for i in range(n_nodes - 1):
        add_edge(nodes[i], nodes[i + 1])
    extra = int(rng.integers(0, 13 - len(edges)))
    for _ in range(extra):
        u, v = rng.integers(0, n_nodes, size=2)
        if u == v:
            v = (v + 1) % n_nodes
        add_edge(nodes[int(u)], nodes[int(v)])

    graph = NetworkGraph.from_edges(edges, extra_nodes=nodes)
    stations = []
    n_stations = int(rng.integers(0, 4))
    if n_stations:
        chosen = rng.choice(len(edges), size=min(n_stations, len(edges)),
                            replace=False)
        for si, ei in enumerate(chosen):
            inventory = []
            for vtype in (EBIKE, ESCOOTER, ECAR):
                if rng.random() < 0.5:
                    inventory.append(VehicleUnit(
                        f"V{si}-{vtype.value}", vtype,
                        float(rng.uniform(30, 100)), CAPACITY_WH[vtype]))
            stations.append(Station(f"ST{si}", edges[int(ei)].edge_id,
                                    capacity=8, inventory=inventory))

    table = {}
    for e in edges:
        table[e.edge_id] = {}
        for c in AgentClass:
            if c not in e.allowed_classes:
                table[e.edge_id][c] = None
            elif rng.random() < 0.06:
                table[e.edge_id][c] = 0.0
            else:
                table[e.edge_id][c] = \
                    e.free_flow_mps[c] * float(rng.uniform(0.2, 1.0))

    o, d = rng.integers(0, len(edges), size=2)
    modes = frozenset(
        m for m in (WALK, EBIKE, ESCOOTER, ECAR) if rng.random() < 0.85
    ) | {WALK}
    budgets = {}
    for m in modes:
        if m != WALK and rng.random() < 0.5:
            cap = 400.0 if m == ECAR else 60.0
            budgets[m] = float(rng.uniform(0, cap))
    request = RouteRequest(
        origin_edge=edges[int(o)].edge_id,
        destination_edge=edges[int(d)].edge_id,
        max_transfers=int(rng.integers(0, 4)),
        modes=modes, energy_budget_wh=budgets)
    return graph, stations, request, TrafficSnapshot(table)


class TestSolverMatchesOracle:
    def test_exactness_on_random_instances(self):
        rng = np.random.default_rng(20240601)
        feasible = 0
        for _ in range(220):
            graph, stations, request, snapshot = random_instance(rng)
            xg = expand_graph(graph, stations, request, snapshot)
            try:
                plan = solve_route(request, xg)
            except NoRouteError:
                plan = None
            try:
                oracle = brute_force_oracle(request, xg)
            except NoRouteError:
                oracle = None
            assert (plan is None) == (oracle is None)
            if plan is None:
                continue
            feasible += 1
            assert plan.total_time_s == oracle.total_time_s
            assert plan.canonical_dict() == oracle.canonical_dict()
            validate_plan(plan, request, xg)
        assert feasible >= 100  # the suite must actually exercise routes


class TestCommitRoute:
    def test_walk_only_plan_writes_row_without_transactions(
            self, route_graph, route_stations, fixture_store):
        req = RouteRequest("E1", "E4", max_transfers=0)
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        before = {st.station_id: len(st.inventory) for st in route_stations}
        record = commit_route(plan, route_stations, fixture_store)
        after = {st.station_id: len(st.inventory) for st in route_stations}
        assert before == after
        row = fixture_store.execute_sql(
            f"SELECT start_edge, end_edge FROM user_paths "
            f"WHERE path_id = {record.path_id}").rows
        assert row == [("E1", "E4")]

    def test_scooter_plan_moves_vehicle(self, route_graph, route_stations,
                                        fixture_store):
        req = RouteRequest("E1", "E4")
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        src = next(s for s in route_stations if s.edge_id == "E2")
        dst = next(s for s in route_stations if s.edge_id == "E3")
        src_before, dst_before = len(src.inventory), len(dst.inventory)
        record = commit_route(plan, route_stations, fixture_store)
        assert len(src.inventory) == src_before - 1
        assert len(dst.inventory) == dst_before + 1
        # battery drained by leg energy
        moved = dst.inventory[-1]
        assert moved.battery_level < 80.0
        assert record.optimal_path_sequence.count("(") == 3

    def test_sequence_serialization_groups(self, route_graph, route_stations):
        req = RouteRequest("E1", "E4")
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        assert plan.serialized_sequence() == \
            "(E2,walk),(E3,escooter),(E4,walk)"

    def test_vehicle_taken_since_solve(self, route_graph, route_stations,
                                       fixture_store):
        req = RouteRequest("E1", "E4")
        xg = expand_graph(route_graph, route_stations, req,
                          TrafficSnapshot.free_flow(route_graph))
        plan = solve_route(req, xg)
        src = next(s for s in route_stations if s.edge_id == "E2")
        src.inventory.clear()
        with pytest.raises(NotAvailable):
            commit_route(plan, route_stations, fixture_store)

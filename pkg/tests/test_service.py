import json
import time

import pytest
from fastapi.testclient import TestClient

from ehubsim.embeddings import FixtureEmbeddingProvider
from ehubsim.network import generate_synthetic_grid
from ehubsim.rag import ReplayBackend
from ehubsim.service import PlatformState, create_app
from tests.conftest import CASSETTES, FIXTURES, make_fixture_store


@pytest.fixture()
def grid_scenario(tmp_path):
    net = tmp_path / "net.jsonl"
    net.write_text(generate_synthetic_grid(3, 3, seed=5), encoding="utf-8")
    return {"network": str(net), "duration_s": 720,
            "aggregation_window_s": 360,
            "stations": {"count": 3, "seed": 1}}


@pytest.fixture()
def route_scenario():
    stations = json.loads(
        (FIXTURES / "route_stations.json").read_text(encoding="utf-8"))
    return {"network": str(FIXTURES / "route_network.jsonl"),
            "duration_s": 720, "aggregation_window_s": 360,
            "stations": {"explicit": stations}}


@pytest.fixture()
def client():
    state = PlatformState()
    state.query_store = make_fixture_store()
    state.rag_provider = FixtureEmbeddingProvider.from_file(
        FIXTURES / "fixture_embeddings.json")
    state.rag_backend = ReplayBackend(CASSETTES / "fixture_query.json")
    return TestClient(create_app(state))


class TestScenarioLifecycle:
    def test_create_and_run(self, client, grid_scenario):
        resp = client.post("/scenario", json=grid_scenario)
        assert resp.status_code == 201
        sid = resp.json()["scenario_id"]

        resp = client.post(f"/simulation/{sid}/start")
        assert resp.status_code == 200
        for _ in range(100):
            status = client.get(f"/simulation/{sid}").json()["status"]
            if status == "finished":
                break
            time.sleep(0.2)
        assert status == "finished"

        resp = client.get("/traffic", params={"scenario": sid})
        assert resp.status_code == 200
        records = resp.json()["records"]
        assert len(records) == 2 * 24  # two windows, 24 edges

    def test_invalid_config_400(self, client):
        resp = client.post("/scenario", json={"bogus": True})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "VALIDATION_ERROR"

    def test_double_start_conflicts(self, client, grid_scenario):
        grid_scenario = dict(grid_scenario, duration_s=86400)
        sid = client.post("/scenario", json=grid_scenario).json()["scenario_id"]
        assert client.post(f"/simulation/{sid}/start").status_code == 200
        try:
            resp = client.post(f"/simulation/{sid}/start")
            assert resp.status_code == 409
        finally:
            client.post(f"/simulation/{sid}/stop")

    def test_stop_without_running_conflicts(self, client, grid_scenario):
        sid = client.post("/scenario", json=grid_scenario).json()["scenario_id"]
        resp = client.post(f"/simulation/{sid}/stop")
        assert resp.status_code == 409

    def test_traffic_before_any_data_404(self, client, grid_scenario):
        sid = client.post("/scenario", json=grid_scenario).json()["scenario_id"]
        resp = client.get("/traffic", params={"scenario": sid})
        assert resp.status_code == 404
        assert resp.json()["error"]["code"] == "NO_DATA_YET"


class TestStations:
    def test_station_listing_and_detail(self, client, route_scenario):
        client.post("/scenario", json=route_scenario)
        stations = client.get("/stations").json()["stations"]
        assert {s["station_id"] for s in stations} == {"STA", "STB"}
        detail = client.get("/stations/STA").json()
        assert detail["edge_id"] == "E2"
        assert detail["inventory"][0]["vehicle_type"] == "escooter"

    def test_unknown_station_404(self, client):
        assert client.get("/stations/NOPE").status_code == 404


class TestRoute:
    def test_fixture_plan_over_http(self, client, route_scenario):
        client.post("/scenario", json=route_scenario)
        resp = client.post("/route", json={
            "origin_edge": "E1", "destination_edge": "E4"})
        assert resp.status_code == 200
        plan = resp.json()
        assert [leg["mode"] for leg in plan["legs"]] == \
            ["walk", "escooter", "walk"]
        assert plan["total_time_s"] == pytest.approx(600.0)
        assert plan["serialized_sequence"] == \
            "(E2,walk),(E3,escooter),(E4,walk)"

    def test_no_route_422(self, client, route_scenario):
        client.post("/scenario", json=route_scenario)
        resp = client.post("/route", json={
            "origin_edge": "E4", "destination_edge": "E1"})  # one-way chain
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "NO_ROUTE"

    def test_unknown_edge_400(self, client, route_scenario):
        client.post("/scenario", json=route_scenario)
        resp = client.post("/route", json={
            "origin_edge": "E1", "destination_edge": "NOPE"})
        assert resp.status_code == 400


class TestQuery:
    QUESTION = "Find the top 3 most frequent destinations."

    def test_replayed_query_end_to_end(self, client):
        resp = client.post("/query", json={"question": self.QUESTION,
                                           "user_class": "user"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["retrieved_schemas"][0]["doc_id"] == "user_paths"
        assert body["generated_sql"].startswith("SELECT end_edge")
        assert body["result"]["rows"] == [["E9", 4], ["E2", 3], ["E5", 2]]

    def test_byte_identical_sql_across_runs(self, client):
        sqls = {client.post("/query", json={"question": self.QUESTION}).json()[
                    "generated_sql"] for _ in range(3)}
        assert len(sqls) == 1

    def test_cassette_miss_502(self, client):
        resp = client.post("/query", json={"question": "unknown question"})
        assert resp.status_code == 502

    def test_backend_missing_502(self):
        state = PlatformState()
        state.query_store = make_fixture_store()
        with TestClient(create_app(state)) as c:
            resp = c.post("/query", json={"question": "anything"})
            assert resp.status_code == 502


class TestEval:
    def test_eval_run_and_report(self, tmp_path):
        state = PlatformState()
        state.query_store = make_fixture_store()
        client = TestClient(create_app(state))
        resp = client.post("/eval/run", json={
            "corpus": str(CASSETTES.parent / "qa_golden20.jsonl"),
            "backend": f"replay:{CASSETTES / 'golden_20.json'}"})
        assert resp.status_code == 200
        report_id = resp.json()["report_id"]
        report = client.get(f"/eval/report/{report_id}").json()
        accuracies = {s["user_class"]: s["execution_accuracy"]
                      for s in report["slices"]}
        assert accuracies == {"system_operator": 0.8, "user": 0.8}
        heat = client.get(f"/eval/report/{report_id}/heatmap").json()
        for row in heat["rows"]:
            assert sum(row["proportions"]) == pytest.approx(1.0, abs=1e-9)

    def test_unknown_report_404(self, client):
        assert client.get("/eval/report/nope").status_code == 404


class TestStream:
    def test_subscribers_receive_each_completed_window(self, client,
                                                       grid_scenario):
        import queue

        app_state = client.app.state.platform
        q: queue.Queue = queue.Queue()
        with app_state.lock:
            app_state.subscribers.append(q)
        sid = client.post("/scenario", json=grid_scenario).json()["scenario_id"]
        client.post(f"/simulation/{sid}/start")
        for _ in range(100):
            if client.get(f"/simulation/{sid}").json()["status"] == "finished":
                break
            time.sleep(0.2)
        payloads = []
        while not q.empty():
            payloads.append(json.loads(q.get_nowait()))
        assert [p["simulation_time"] for p in payloads] == [0, 360]
        assert len(payloads[0]["records"]) == 24
        first = payloads[0]["records"][0]
        assert set(first) == {"edge_id", "simulation_time", "pedestrian_speed",
                              "bike_speed", "car_speed"}


class TestRouteWhatIf:
    def test_traffic_level_selects_matching_scenario(self, client,
                                                     route_scenario):
        low = dict(route_scenario, traffic_level="low")
        high = dict(route_scenario, traffic_level="high")
        client.post("/scenario", json=low)
        client.post("/scenario", json=high)
        resp = client.post("/route", json={
            "origin_edge": "E1", "destination_edge": "E4",
            "traffic_level": "high"})
        assert resp.status_code == 200

    def test_unknown_level_scenario_404(self, client, route_scenario):
        client.post("/scenario", json=dict(route_scenario,
                                           traffic_level="low"))
        resp = client.post("/route", json={
            "origin_edge": "E1", "destination_edge": "E4",
            "traffic_level": "medium"})
        assert resp.status_code == 404

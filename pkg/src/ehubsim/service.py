"""HTTP API binding the platform modules.

One simulation runs at a time per service instance; scenarios, their
stores, and evaluation reports are the only keyed server-side resources.
Completed aggregation windows are pushed to /traffic/stream subscribers
as server-sent events.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import evalsuite
from .errors import (
    BackendUnavailable,
    EhubError,
    NoDataYet,
    ValidationError,
)
from .network import (
    NetworkGraph,
    ScenarioConfig,
    TrafficLevel,
    TransportMode,
    build_graph,
    parse_scenario,
)
from .rag import LlmBackend, RagPipeline, ReplayBackend
from .routing import (
    RouteRequest,
    TrafficSnapshot,
    expand_graph,
    solve_route,
)
from .simulation import run_scenario_to_store
from .stations import Station, stations_from_spec
from .store import Datastore
from .embeddings import EmbeddingProvider, HashingEmbeddingProvider


@dataclass
class ScenarioRuntime:
    scenario_id: str
    config: ScenarioConfig
    graph: NetworkGraph
    stations: list[Station]
    store: Datastore
    status: str = "queued"  # queued | running | finished | stopped | failed
    summary: Optional[dict] = None


@dataclass
class ActiveSim:
    scenario_id: str
    thread: threading.Thread
    stop_flag: threading.Event


@dataclass
class PlatformState:
    """Everything the endpoints share; tests may pre-populate it."""

    scenarios: dict[str, ScenarioRuntime] = field(default_factory=dict)
    active: Optional[ActiveSim] = None
    reports: dict[str, evalsuite.EvalReport] = field(default_factory=dict)
    rag_provider: EmbeddingProvider = field(default_factory=HashingEmbeddingProvider)
    rag_backend: Optional[LlmBackend] = None
    query_store: Optional[Datastore] = None
    _counter: int = 0
    _pipeline: Optional[RagPipeline] = None
    subscribers: list[queue.Queue] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def next_id(self, prefix: str) -> str:
        with self.lock:
            self._counter += 1
            return f"{prefix}{self._counter}"

    def pipeline(self) -> RagPipeline:
        store = self.query_store
        if store is None:
            runtime = self._latest_finished()
            if runtime is None:
                raise NoDataYet("no queryable store: run a simulation first "
                                "or configure a fixture store")
            store = runtime.store
        if self._pipeline is None or self._pipeline.store is not store:
            self._pipeline = RagPipeline(store, self.rag_provider)
        return self._pipeline

    def _latest_finished(self) -> Optional[ScenarioRuntime]:
        done = [r for r in self.scenarios.values()
                if r.status in ("running", "finished", "stopped")]
        return done[-1] if done else None

    def publish_window(self, records) -> None:
        payload = json.dumps({
            "simulation_time": records[0].simulation_time,
            "records": [json.loads(r.to_json()) for r in records],
        })
        with self.lock:
            for q in list(self.subscribers):
                try:
                    q.put_nowait(payload)
                except queue.Full:
                    pass


def _error_response(exc: EhubError) -> JSONResponse:
    return JSONResponse(
        status_code=exc.http_status,
        content={"error": {"code": exc.code, "message": str(exc)}},
    )


def create_app(state: Optional[PlatformState] = None) -> FastAPI:
    app = FastAPI(title="ehubsim", version="0.1.0")
    platform = state if state is not None else PlatformState()
    app.state.platform = platform

    @app.exception_handler(EhubError)
    async def handle_domain_error(request: Request, exc: EhubError):
        return _error_response(exc)

    # --- scenarios and simulation lifecycle --------------------------------

    @app.post("/scenario", status_code=201)
    async def create_scenario(body: dict):
        config = parse_scenario(body)
        graph = build_graph(config)
        stations = stations_from_spec(graph, config.stations)
        store = Datastore()
        store.init_schema()
        store.replace_station_rows(stations)
        scenario_id = platform.next_id("s")
        platform.scenarios[scenario_id] = ScenarioRuntime(
            scenario_id=scenario_id, config=config, graph=graph,
            stations=stations, store=store)
        return {"scenario_id": scenario_id, "status": "queued",
                "nodes": len(graph.nodes), "edges": len(graph.edges),
                "stations": len(stations)}

    def _get_runtime(scenario_id: str) -> ScenarioRuntime:
        runtime = platform.scenarios.get(scenario_id)
        if runtime is None:
            raise NoDataYet(f"unknown scenario {scenario_id}")
        return runtime

    @app.post("/simulation/{scenario_id}/start")
    async def start_simulation(scenario_id: str):
        runtime = _get_runtime(scenario_id)
        with platform.lock:
            if platform.active is not None and platform.active.thread.is_alive():
                return JSONResponse(status_code=409, content={"error": {
                    "code": "SIMULATION_CONFLICT",
                    "message": "another simulation is already running"}})
            if runtime.status == "running":
                return JSONResponse(status_code=409, content={"error": {
                    "code": "SIMULATION_CONFLICT",
                    "message": "simulation already running"}})
            stop_flag = threading.Event()

            def work() -> None:
                try:
                    summary = run_scenario_to_store(
                        runtime.config, runtime.store, graph=runtime.graph,
                        stop_requested=stop_flag.is_set,
                        on_window=platform.publish_window)
                    runtime.summary = summary.__dict__
                    runtime.status = "stopped" if stop_flag.is_set() else "finished"
                except Exception:
                    runtime.status = "failed"

            thread = threading.Thread(target=work, name=f"sim-{scenario_id}")
            runtime.status = "running"
            platform.active = ActiveSim(scenario_id, thread, stop_flag)
            thread.start()
        return {"scenario_id": scenario_id, "status": "running"}

    @app.post("/simulation/{scenario_id}/stop")
    async def stop_simulation(scenario_id: str):
        runtime = _get_runtime(scenario_id)
        active = platform.active
        if active is None or active.scenario_id != scenario_id \
                or not active.thread.is_alive():
            if runtime.status in ("finished", "stopped", "failed"):
                return {"scenario_id": scenario_id, "status": runtime.status}
            return JSONResponse(status_code=409, content={"error": {
                "code": "SIMULATION_CONFLICT",
                "message": "simulation is not running"}})
        active.stop_flag.set()
        active.thread.join()
        return {"scenario_id": scenario_id, "status": runtime.status}

    @app.get("/simulation/{scenario_id}")
    async def simulation_status(scenario_id: str):
        runtime = _get_runtime(scenario_id)
        return {"scenario_id": scenario_id, "status": runtime.status,
                "summary": runtime.summary}

    # --- traffic ------------------------------------------------------------

    def _traffic_store(scenario_id: Optional[str]) -> Datastore:
        if scenario_id:
            return _get_runtime(scenario_id).store
        if platform.query_store is not None:
            return platform.query_store
        runtime = platform._latest_finished()
        if runtime is None:
            raise NoDataYet("no simulation data available")
        return runtime.store

    @app.get("/traffic")
    async def traffic(edge: Optional[str] = None, frm: Optional[int] = None,
                      to: Optional[int] = None, scenario: Optional[str] = None,
                      request: Request = None):
        params = dict(request.query_params) if request else {}
        frm = int(params.get("from", frm)) if params.get("from") is not None else frm
        store = _traffic_store(scenario)
        clauses, args = [], []
        if edge:
            clauses.append("edge_id = ?")
            args.append(edge)
        if frm is not None:
            clauses.append("simulation_time >= ?")
            args.append(int(frm))
        if to is not None:
            clauses.append("simulation_time < ?")
            args.append(int(to))
        where = f" WHERE {' AND '.join(clauses)}" if clauses else ""
        with store._lock:
            cur = store._conn.execute(
                "SELECT edge_id, simulation_time, pedestrian_speed, bike_speed, "
                f"car_speed FROM online_demo{where} "
                "ORDER BY simulation_time, edge_id", args)
            rows = cur.fetchall()
        if not rows:
            raise NoDataYet("no traffic records match the query")
        return {"records": [
            {"edge_id": r[0], "simulation_time": r[1], "pedestrian_speed": r[2],
             "bike_speed": r[3], "car_speed": r[4]} for r in rows]}

    @app.get("/traffic/stream")
    async def traffic_stream():
        q: queue.Queue = queue.Queue(maxsize=256)
        with platform.lock:
            platform.subscribers.append(q)

        def gen():
            try:
                while True:
                    try:
                        payload = q.get(timeout=30.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield f"data: {payload}\n\n"
            finally:
                with platform.lock:
                    if q in platform.subscribers:
                        platform.subscribers.remove(q)

        return StreamingResponse(gen(), media_type="text/event-stream")

    # --- stations -----------------------------------------------------------

    def _all_stations() -> list[Station]:
        out = []
        for runtime in platform.scenarios.values():
            out.extend(runtime.stations)
        return out

    @app.get("/stations")
    async def stations_index(scenario: Optional[str] = None):
        stations = (_get_runtime(scenario).stations if scenario
                    else _all_stations())
        return {"stations": [_station_json(st) for st in stations]}

    @app.get("/stations/{station_id}")
    async def station_detail(station_id: str):
        for st in _all_stations():
            if st.station_id == station_id:
                return _station_json(st)
        raise NoDataYet(f"unknown station {station_id}")

    def _station_json(st: Station) -> dict:
        return {
            "station_id": st.station_id,
            "edge_id": st.edge_id,
            "capacity": st.capacity,
            "free_docks": st.free_docks(),
            "inventory": [{
                "vehicle_id": u.vehicle_id,
                "vehicle_type": u.vehicle_type.value,
                "battery_level": u.battery_level,
            } for u in sorted(st.inventory, key=lambda u: u.vehicle_id)],
        }

    # --- routing ------------------------------------------------------------

    @app.post("/route")
    async def route(body: dict):
        scenario_id = body.get("scenario_id")
        if scenario_id is None and "traffic_level" in body:
            # what-if re-query: pick the newest scenario at that level
            try:
                level = TrafficLevel(str(body["traffic_level"]).lower())
            except ValueError:
                raise ValidationError(
                    f"traffic_level must be low/medium/high, "
                    f"got {body['traffic_level']!r}")
            matching = [sid for sid, rt in platform.scenarios.items()
                        if rt.config.traffic_level == level]
            if not matching:
                raise NoDataYet(
                    f"no scenario configured at traffic level {level.value}")
            scenario_id = sorted(matching)[-1]
        if scenario_id is None:
            if not platform.scenarios:
                raise NoDataYet("create a scenario first")
            scenario_id = sorted(platform.scenarios)[-1]
        runtime = _get_runtime(scenario_id)
        try:
            modes = frozenset(TransportMode(m) for m in body.get(
                "modes", [m.value for m in TransportMode]))
            budgets = {TransportMode(k): float(v) for k, v in
                       body.get("energy_budget_wh", {}).items()}
            request_obj = RouteRequest(
                origin_edge=str(body["origin_edge"]),
                destination_edge=str(body["destination_edge"]),
                max_transfers=int(body.get("max_transfers", 2)),
                modes=modes,
                energy_budget_wh=budgets,
            )
        except KeyError as exc:
            raise ValidationError(f"missing route field: {exc}") from exc
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        if not runtime.graph.has_edge(request_obj.origin_edge):
            raise ValidationError(f"unknown edge {request_obj.origin_edge}")
        if not runtime.graph.has_edge(request_obj.destination_edge):
            raise ValidationError(f"unknown edge {request_obj.destination_edge}")
        try:
            snapshot = TrafficSnapshot(
                runtime.store.snapshot_traffic(float(body.get("at_s", 1e18))))
        except NoDataYet:
            snapshot = TrafficSnapshot.free_flow(runtime.graph)
        xg = expand_graph(runtime.graph, runtime.stations, request_obj,
                          snapshot, energy_params=runtime.config.energy)
        plan = solve_route(request_obj, xg)
        payload = plan.canonical_dict()
        payload["execution_time_ms"] = plan.execution_time_ms
        payload["serialized_sequence"] = plan.serialized_sequence()
        return payload

    # --- question answering ---------------------------------------------------

    @app.post("/query")
    async def query(body: dict):
        question = str(body.get("question", "")).strip()
        if not question:
            raise ValidationError("question must be non-empty")
        pipeline = platform.pipeline()
        if "sql" in body:
            # user-edited SQL: execute as-is (read-only enforced by the store)
            sql = str(body["sql"])
            result = pipeline.store.execute_sql(sql)
            return {
                "question": question,
                "user_class": body.get("user_class", "user"),
                "retrieved_schemas": [],
                "generated_sql": sql,
                "result": {"columns": result.columns,
                           "rows": [list(row) for row in result.rows]},
            }
        backend = platform.rag_backend
        if "cassette" in body:
            backend = ReplayBackend(body["cassette"])
        if backend is None:
            raise BackendUnavailable("no SQL generation backend configured")
        answer = pipeline.answer(question, backend)
        return {
            "question": question,
            "user_class": body.get("user_class", "user"),
            "retrieved_schemas": [
                {"doc_id": r.doc.doc_id, "score": r.score}
                for r in answer.retrieved
            ],
            "generated_sql": answer.sql,
            "result": {
                "columns": answer.result.columns,
                "rows": [list(row) for row in answer.result.rows],
            },
        }

    # --- evaluation ------------------------------------------------------------

    @app.post("/eval/run")
    async def eval_run(body: dict):
        corpus_path = body.get("corpus")
        if not corpus_path:
            raise ValidationError("missing corpus path")
        backend_spec = body.get("backend", "")
        backend = _resolve_backend(backend_spec, platform)
        cases = evalsuite.load_corpus(corpus_path)
        pipeline = platform.pipeline()
        report = evalsuite.run_evaluation(
            cases, pipeline.predictor(backend), pipeline.store,
            model=backend.backend_id)
        report_id = platform.next_id("r")
        platform.reports[report_id] = report
        return {"report_id": report_id, "partial": report.partial}

    @app.get("/eval/report/{report_id}")
    async def eval_report(report_id: str):
        report = platform.reports.get(report_id)
        if report is None:
            raise NoDataYet(f"unknown report {report_id}")
        return json.loads(report.to_json())

    @app.get("/eval/report/{report_id}/heatmap")
    async def eval_heatmap(report_id: str):
        report = platform.reports.get(report_id)
        if report is None:
            raise NoDataYet(f"unknown report {report_id}")
        return report.heatmap_data()

    return app


def _resolve_backend(spec: str, platform: PlatformState) -> LlmBackend:
    if spec.startswith("replay:"):
        return ReplayBackend(spec.split(":", 1)[1])
    if platform.rag_backend is not None:
        return platform.rag_backend
    raise BackendUnavailable(f"cannot resolve backend {spec!r}")

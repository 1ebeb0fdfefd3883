// Thin fetch wrapper around the platform API. Errors carry the server's
// machine code so panels can surface it next to the message.

import type {
  ApiErrorBody,
  EvalReportResponse,
  HeatmapResponse,
  QueryResponse,
  RoutePlanResponse,
  ScenarioCreated,
  SimulationStatus,
  StationInfo,
  TrafficRecord,
} from "./types";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const payload = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      const err = payload as ApiErrorBody;
      throw new ApiError(
        resp.status,
        err.error?.code ?? "UNKNOWN",
        err.error?.message ?? resp.statusText,
      );
    }
    return payload as T;
  }

  createScenario(config: unknown): Promise<ScenarioCreated> {
    return this.request("POST", "/scenario", config);
  }

  startSimulation(scenarioId: string): Promise<SimulationStatus> {
    return this.request("POST", `/simulation/${scenarioId}/start`);
  }

  stopSimulation(scenarioId: string): Promise<SimulationStatus> {
    return this.request("POST", `/simulation/${scenarioId}/stop`);
  }

  simulationStatus(scenarioId: string): Promise<SimulationStatus> {
    return this.request("GET", `/simulation/${scenarioId}`);
  }

  traffic(params: { edge?: string; from?: number; to?: number; scenario?: string }):
      Promise<{ records: TrafficRecord[] }> {
    const search = new URLSearchParams();
    if (params.edge) search.set("edge", params.edge);
    if (params.from !== undefined) search.set("from", String(params.from));
    if (params.to !== undefined) search.set("to", String(params.to));
    if (params.scenario) search.set("scenario", params.scenario);
    const qs = search.toString();
    return this.request("GET", `/traffic${qs ? "?" + qs : ""}`);
  }

  stations(): Promise<{ stations: StationInfo[] }> {
    return this.request("GET", "/stations");
  }

  route(body: {
    origin_edge: string;
    destination_edge: string;
    max_transfers?: number;
    modes?: string[];
    scenario_id?: string;
  }): Promise<RoutePlanResponse> {
    return this.request("POST", "/route", body);
  }

  query(body: { question: string; user_class?: string }): Promise<QueryResponse> {
    return this.request("POST", "/query", body);
  }

  runEval(body: { corpus: string; backend: string }): Promise<{ report_id: string }> {
    return this.request("POST", "/eval/run", body);
  }

  evalReport(reportId: string): Promise<EvalReportResponse> {
    return this.request("GET", `/eval/report/${reportId}`);
  }

  evalHeatmap(reportId: string): Promise<HeatmapResponse> {
    return this.request("GET", `/eval/report/${reportId}/heatmap`);
  }

  streamTraffic(onWindow: (payload: unknown) => void): () => void {
    const source = new EventSource(this.baseUrl + "/traffic/stream");
    source.onmessage = (event) => onWindow(JSON.parse(event.data));
    return () => source.close();
  }
}

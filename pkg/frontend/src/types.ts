// Payload shapes of the platform HTTP API. The dashboard never computes
// domain results itself; every number shown comes from these responses.

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export interface ScenarioCreated {
  scenario_id: string;
  status: string;
  nodes: number;
  edges: number;
  stations: number;
}

export interface SimulationStatus {
  scenario_id: string;
  status: string;
  summary?: Record<string, unknown> | null;
}

export interface TrafficRecord {
  edge_id: string;
  simulation_time: number;
  pedestrian_speed: number | null;
  bike_speed: number | null;
  car_speed: number | null;
}

export interface WindowPayload {
  simulation_time: number;
  records: TrafficRecord[];
}

export interface StationInfo {
  station_id: string;
  edge_id: string;
  capacity: number;
  free_docks: number;
  inventory: { vehicle_id: string; vehicle_type: string; battery_level: number }[];
}

export type TransportMode = "walk" | "ebike" | "escooter" | "ecar";

export interface RouteLeg {
  mode: TransportMode;
  edges: string[];
  leg_time_s: number;
  leg_energy_wh: number;
}

export interface RoutePlanResponse {
  origin_edge: string;
  destination_edge: string;
  total_time_s: number;
  transfers: number;
  legs: RouteLeg[];
  execution_time_ms: number;
  serialized_sequence: string;
}

export interface QueryResponse {
  question: string;
  user_class: string;
  retrieved_schemas: { doc_id: string; score: number }[];
  generated_sql: string;
  result: { columns: string[]; rows: unknown[][] };
}

export interface EvalSlice {
  model: string;
  user_class: string;
  case_count: number;
  execution_accuracy: number;
  metric_medians: Record<string, number>;
  error_counts: Record<string, number>;
  error_proportions: Record<string, number>;
}

export interface EvalReportResponse {
  model: string;
  partial: boolean;
  slices: EvalSlice[];
  cases: Record<string, unknown>[];
}

export interface HeatmapResponse {
  error_types: string[];
  rows: { model: string; user_class: string; proportions: number[] }[];
}

export interface NetworkNode {
  id: string;
  x: number;
  y: number;
}

export interface NetworkEdge {
  id: string;
  from: string;
  to: string;
  free_flow_car: number | null;
}

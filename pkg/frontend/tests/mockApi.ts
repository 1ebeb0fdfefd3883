// fetch mocking for panel tests: route table of method+path -> response.
// Every number the dashboard shows must originate here, never from
// client-side computation.

import { vi } from "vitest";

export interface MockRoute {
  method: string;
  path: string | RegExp;
  status?: number;
  body: unknown;
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export function installFetchMock(routes: MockRoute[]): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal("fetch", vi.fn(async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.toString();
    calls.push({
      method,
      path,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    for (const route of routes) {
      const matches = typeof route.path === "string"
        ? path === route.path || path.endsWith(route.path)
        : route.path.test(path);
      if (matches && route.method === method) {
        return new Response(JSON.stringify(route.body), {
          status: route.status ?? 200,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({
      error: { code: "NO_DATA_YET", message: `no mock for ${method} ${path}` },
    }), { status: 404 });
  }));
  return calls;
}

// The fixture plan the primary component produces for its demo network:
// walk 300 s, e-scooter 100 s, walk 200 s.
export const FIXTURE_PLAN = {
  origin_edge: "E1",
  destination_edge: "E4",
  total_time_s: 600.0,
  transfers: 2,
  legs: [
    { mode: "walk", edges: ["E2"], leg_time_s: 300.0, leg_energy_wh: 0.0 },
    { mode: "escooter", edges: ["E3"], leg_time_s: 100.0, leg_energy_wh: 9.0 },
    { mode: "walk", edges: ["E4"], leg_time_s: 200.0, leg_energy_wh: 0.0 },
  ],
  execution_time_ms: 0.4,
  serialized_sequence: "(E2,walk),(E3,escooter),(E4,walk)",
};

export const FIXTURE_QUERY_RESPONSE = {
  question: "Find the top 3 most frequent destinations.",
  user_class: "user",
  retrieved_schemas: [
    { doc_id: "user_paths", score: 0.9986 },
    { doc_id: "stations", score: 0.1104 },
    { doc_id: "online_demo", score: 0.0 },
  ],
  generated_sql:
    "SELECT end_edge, COUNT(*) AS freq FROM user_paths " +
    "GROUP BY end_edge ORDER BY freq DESC LIMIT 3",
  result: {
    columns: ["end_edge", "freq"],
    rows: [["E9", 4], ["E2", 3], ["E5", 2]],
  },
};

export const FIXTURE_HEATMAP = {
  error_types: ["QSD", "QLE", "RPE", "RGE"],
  rows: [
    { model: "replay", user_class: "system_operator",
      proportions: [0.5, 0.5, 0.0, 0.0] },
    { model: "replay", user_class: "user",
      proportions: [0.25, 0.25, 0.25, 0.25] },
  ],
};

export const FIXTURE_REPORT = {
  model: "replay",
  partial: false,
  slices: [
    {
      model: "replay",
      user_class: "system_operator",
      case_count: 10,
      execution_accuracy: 0.8,
      metric_medians: {
        component_f1: 1.0, bleu_1: 1.0, bleu_2: 1.0, bleu_3: 1.0,
        bleu_4: 1.0, rouge_1: 1.0, rouge_2: 1.0, rouge_l: 1.0,
      },
      error_counts: { QSD: 1, QLE: 1, RPE: 0, RGE: 0 },
      error_proportions: { QSD: 0.5, QLE: 0.5, RPE: 0.0, RGE: 0.0 },
    },
    {
      model: "replay",
      user_class: "user",
      case_count: 10,
      execution_accuracy: 0.8,
      metric_medians: {
        component_f1: 0.93, bleu_1: 0.84, bleu_2: 0.78, bleu_3: 0.72,
        bleu_4: 0.68, rouge_1: 0.89, rouge_2: 0.78, rouge_l: 0.89,
      },
      error_counts: { QSD: 1, QLE: 1, RPE: 1, RGE: 1 },
      error_proportions: { QSD: 0.25, QLE: 0.25, RPE: 0.25, RGE: 0.25 },
    },
  ],
  cases: [],
};

// Route console: pick origin/destination edges, render the optimal plan
// with one colored segment per leg, and re-query under a different
// traffic level for what-if comparisons.

import { ApiClient, ApiError } from "./api";
import { MODE_COLORS, MODE_LABELS } from "./colors";
import type { RoutePlanResponse, TransportMode } from "./types";

export class RouteConsole {
  readonly root: HTMLElement;
  private originEl!: HTMLInputElement;
  private destEl!: HTMLInputElement;
  private levelEl!: HTMLSelectElement;
  private planEl!: HTMLElement;
  private emptyEl!: HTMLElement;
  lastPlan: RoutePlanResponse | null = null;

  constructor(private readonly api: ApiClient, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "route-console";
    this.root.innerHTML = `
      <h2>Route planner</h2>
      <form class="route-form">
        <label>From <input class="origin" placeholder="edge id"></label>
        <label>To <input class="destination" placeholder="edge id"></label>
        <label>Traffic
          <select class="level">
            <option value="current">current</option>
            <option value="low">low</option>
            <option value="medium">medium</option>
            <option value="high">high</option>
          </select>
        </label>
        <button type="submit">Plan</button>
      </form>
      <div class="empty-state" hidden></div>
      <div class="plan"></div>
      <div class="legend"></div>
    `;
    this.originEl = this.root.querySelector(".origin") as HTMLInputElement;
    this.destEl = this.root.querySelector(".destination") as HTMLInputElement;
    this.levelEl = this.root.querySelector(".level") as HTMLSelectElement;
    this.planEl = this.root.querySelector(".plan") as HTMLElement;
    this.emptyEl = this.root.querySelector(".empty-state") as HTMLElement;
    this.renderLegend(doc);
    (this.root.querySelector(".route-form") as HTMLFormElement)
      .addEventListener("submit", (event) => {
        event.preventDefault();
        void this.plan();
      });
    this.levelEl.addEventListener("change", () => {
      if (this.lastPlan) void this.plan();
    });
  }

  private renderLegend(doc: Document): void {
    const legend = this.root.querySelector(".legend") as HTMLElement;
    for (const mode of Object.keys(MODE_COLORS) as TransportMode[]) {
      const item = doc.createElement("span");
      item.className = "legend-item";
      item.dataset.mode = mode;
      item.style.color = MODE_COLORS[mode];
      item.textContent = MODE_LABELS[mode];
      legend.appendChild(item);
    }
  }

  async plan(): Promise<void> {
    this.emptyEl.hidden = true;
    const body: Record<string, unknown> = {
      origin_edge: this.originEl.value.trim(),
      destination_edge: this.destEl.value.trim(),
    };
    if (this.levelEl.value !== "current") {
      body.traffic_level = this.levelEl.value;
    }
    try {
      const plan = await this.api.route(body as never);
      this.lastPlan = plan;
      this.renderPlan(plan);
    } catch (err) {
      this.lastPlan = null;
      this.planEl.replaceChildren();
      this.emptyEl.hidden = false;
      if (err instanceof ApiError && err.code === "NO_ROUTE") {
        this.emptyEl.textContent =
          "No feasible route: try more transfers, a larger energy budget, " +
          "or different endpoints.";
      } else if (err instanceof ApiError) {
        this.emptyEl.textContent = `${err.code}: ${err.message}`;
      } else {
        this.emptyEl.textContent = String(err);
      }
    }
  }

  private renderPlan(plan: RoutePlanResponse): void {
    const doc = this.root.ownerDocument;
    this.planEl.replaceChildren();
    const summary = doc.createElement("div");
    summary.className = "plan-summary";
    summary.textContent =
      `${plan.origin_edge} -> ${plan.destination_edge}: ` +
      `${plan.total_time_s.toFixed(0)} s, ${plan.transfers} transfers ` +
      `(solved in ${plan.execution_time_ms.toFixed(1)} ms)`;
    this.planEl.appendChild(summary);

    const bar = doc.createElement("div");
    bar.className = "plan-bar";
    for (const leg of plan.legs) {
      const segment = doc.createElement("div");
      segment.className = "leg-segment";
      segment.dataset.mode = leg.mode;
      segment.style.backgroundColor = MODE_COLORS[leg.mode];
      segment.style.flexGrow = String(Math.max(leg.leg_time_s, 1));
      segment.title =
        `${MODE_LABELS[leg.mode]}: ${leg.edges.join(" > ")} ` +
        `(${leg.leg_time_s.toFixed(0)} s, ${leg.leg_energy_wh.toFixed(1)} Wh)`;
      bar.appendChild(segment);
    }
    this.planEl.appendChild(bar);

    const detail = doc.createElement("ul");
    detail.className = "leg-detail";
    for (const leg of plan.legs) {
      const item = doc.createElement("li");
      item.dataset.mode = leg.mode;
      item.style.color = MODE_COLORS[leg.mode];
      item.textContent =
        `${MODE_LABELS[leg.mode]} via ${leg.edges.join(", ")}: ` +
        `${leg.leg_time_s.toFixed(0)} s, ${leg.leg_energy_wh.toFixed(1)} Wh`;
      detail.appendChild(item);
    }
    this.planEl.appendChild(detail);
  }
}

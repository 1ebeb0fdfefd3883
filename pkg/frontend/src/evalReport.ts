// Evaluation report view: metric-median bar charts per model and an
// error-type proportion heatmap with tooltips.

import { ApiClient } from "./api";
import type { EvalReportResponse, HeatmapResponse } from "./types";

const METRIC_ORDER = [
  "component_f1", "bleu_1", "bleu_2", "bleu_3", "bleu_4",
  "rouge_1", "rouge_2", "rouge_l",
];

export class EvalReportView {
  readonly root: HTMLElement;
  private chartsEl!: HTMLElement;
  private heatmapEl!: HTMLElement;
  private emptyEl!: HTMLElement;

  constructor(private readonly api: ApiClient, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "eval-report";
    this.root.innerHTML = `
      <h2>Evaluation report</h2>
      <form class="load-form">
        <input class="report-id" placeholder="report id">
        <button type="submit">Load</button>
      </form>
      <div class="empty-state" hidden>No report loaded.</div>
      <div class="charts"></div>
      <div class="heatmap"></div>
    `;
    this.chartsEl = this.root.querySelector(".charts") as HTMLElement;
    this.heatmapEl = this.root.querySelector(".heatmap") as HTMLElement;
    this.emptyEl = this.root.querySelector(".empty-state") as HTMLElement;
    (this.root.querySelector(".load-form") as HTMLFormElement)
      .addEventListener("submit", (event) => {
        event.preventDefault();
        const id = (this.root.querySelector(".report-id") as
          HTMLInputElement).value.trim();
        if (id) void this.load(id);
      });
  }

  async load(reportId: string): Promise<void> {
    const [report, heatmap] = await Promise.all([
      this.api.evalReport(reportId),
      this.api.evalHeatmap(reportId),
    ]);
    this.render(report, heatmap);
  }

  render(report: EvalReportResponse, heatmap: HeatmapResponse): void {
    const doc = this.root.ownerDocument;
    this.chartsEl.replaceChildren();
    this.heatmapEl.replaceChildren();
    if (report.slices.length === 0) {
      this.emptyEl.hidden = false;
      return;
    }
    this.emptyEl.hidden = true;

    for (const slice of report.slices) {
      const group = doc.createElement("div");
      group.className = "bar-group";
      group.dataset.model = slice.model;
      group.dataset.userClass = slice.user_class;
      const title = doc.createElement("div");
      title.textContent =
        `${slice.model} / ${slice.user_class} ` +
        `(execution accuracy ${slice.execution_accuracy.toFixed(2)})`;
      group.appendChild(title);
      for (const metric of METRIC_ORDER) {
        const value = slice.metric_medians[metric] ?? 0;
        const row = doc.createElement("div");
        row.className = "bar-row";
        const label = doc.createElement("span");
        label.className = "bar-label";
        label.textContent = metric;
        const bar = doc.createElement("div");
        bar.className = "bar";
        bar.dataset.metric = metric;
        bar.style.width = `${Math.round(value * 200)}px`;
        bar.title = `${metric} median: ${value.toFixed(4)}`;
        const text = doc.createElement("span");
        text.textContent = value.toFixed(3);
        row.append(label, bar, text);
        group.appendChild(row);
      }
      this.chartsEl.appendChild(group);
    }

    const table = doc.createElement("table");
    table.className = "heatmap-table";
    const head = doc.createElement("tr");
    head.appendChild(doc.createElement("th"));
    for (const errorType of heatmap.error_types) {
      const th = doc.createElement("th");
      th.textContent = errorType;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of heatmap.rows) {
      const tr = doc.createElement("tr");
      const name = doc.createElement("th");
      name.textContent = `${row.model} / ${row.user_class}`;
      tr.appendChild(name);
      const total = row.proportions.reduce((a, b) => a + b, 0);
      row.proportions.forEach((proportion, i) => {
        const td = doc.createElement("td");
        td.className = "heat-cell";
        td.dataset.errorType = heatmap.error_types[i];
        td.textContent = proportion.toFixed(2);
        const intensity = Math.round(255 - proportion * 160);
        td.style.backgroundColor = `rgb(255, ${intensity}, ${intensity})`;
        td.title =
          `${heatmap.error_types[i]}: ${(proportion * 100).toFixed(1)}% ` +
          `of errors (row sums to ${total.toFixed(2)})`;
        tr.appendChild(td);
      });
      table.appendChild(tr);
    }
    this.heatmapEl.appendChild(table);
  }
}

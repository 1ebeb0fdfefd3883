// Live traffic map: network edges drawn from abstract node coordinates,
// recolored by car speed relative to free flow on every streamed window.

import { speedColor } from "./colors";
import type { NetworkEdge, NetworkNode, TrafficRecord, WindowPayload } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export class TrafficMap {
  readonly root: HTMLElement;
  private readonly svg: SVGSVGElement;
  private readonly staleBadge: HTMLElement;
  private readonly lines = new Map<string, SVGLineElement>();
  private readonly freeFlow = new Map<string, number | null>();
  private lastWindow: number | null = null;

  constructor(doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "traffic-map";
    const heading = doc.createElement("h2");
    heading.textContent = "Live traffic";
    this.staleBadge = doc.createElement("span");
    this.staleBadge.className = "stale-badge";
    this.staleBadge.hidden = true;
    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("width", "640");
    this.svg.setAttribute("height", "480");
    this.root.append(heading, this.staleBadge, this.svg);
  }

  /** Draw the static network once; edges start at their free-flow color. */
  setNetwork(nodes: NetworkNode[], edges: NetworkEdge[]): void {
    const doc = this.root.ownerDocument;
    this.svg.replaceChildren();
    this.lines.clear();
    this.freeFlow.clear();
    if (nodes.length === 0) return;
    const xs = nodes.map((n) => n.x);
    const ys = nodes.map((n) => n.y);
    const pad = 20;
    const minX = Math.min(...xs);
    const minY = Math.min(...ys);
    const spanX = Math.max(1, Math.max(...xs) - minX);
    const spanY = Math.max(1, Math.max(...ys) - minY);
    const sx = (600 - 2 * pad) / spanX;
    const sy = (440 - 2 * pad) / spanY;
    const pos = new Map(nodes.map((n) => [
      n.id,
      { x: pad + (n.x - minX) * sx, y: pad + (n.y - minY) * sy },
    ]));
    for (const edge of edges) {
      const a = pos.get(edge.from);
      const b = pos.get(edge.to);
      if (!a || !b) continue;
      const line = doc.createElementNS(SVG_NS, "line") as SVGLineElement;
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("stroke-width", "3");
      line.setAttribute("stroke", speedColor(edge.free_flow_car, edge.free_flow_car));
      line.dataset.edgeId = edge.id;
      this.svg.appendChild(line);
      this.lines.set(edge.id, line);
      this.freeFlow.set(edge.id, edge.free_flow_car);
    }
  }

  /** Recolor edges from one completed aggregation window. */
  applyWindow(payload: WindowPayload): void {
    this.lastWindow = payload.simulation_time;
    this.staleBadge.hidden = true;
    for (const record of payload.records) {
      this.applyRecord(record);
    }
  }

  private applyRecord(record: TrafficRecord): void {
    const line = this.lines.get(record.edge_id);
    if (!line) return;
    const free = this.freeFlow.get(record.edge_id) ?? null;
    line.setAttribute("stroke", speedColor(record.car_speed, free));
    line.dataset.carSpeed = record.car_speed === null ? "" : String(record.car_speed);
  }

  /** Mark the view stale, keeping the last window time visible. */
  markDisconnected(): void {
    this.staleBadge.hidden = false;
    this.staleBadge.textContent = this.lastWindow === null
      ? "stale: no data received"
      : `stale: last window t=${this.lastWindow}`;
  }

  edgeColor(edgeId: string): string | null {
    return this.lines.get(edgeId)?.getAttribute("stroke") ?? null;
  }
}

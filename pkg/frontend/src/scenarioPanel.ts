// Scenario setup and simulation lifecycle controls for operators.

import { ApiClient, ApiError } from "./api";

export class ScenarioPanel {
  readonly root: HTMLElement;
  private scenarioId: string | null = null;
  private statusEl!: HTMLElement;
  private bannerEl!: HTMLElement;
  private configEl!: HTMLTextAreaElement;
  private poller: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly api: ApiClient, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "scenario-panel";
    this.render(doc);
  }

  private render(doc: Document): void {
    this.root.innerHTML = `
      <h2>Scenario control</h2>
      <textarea class="config" rows="8" spellcheck="false"></textarea>
      <div class="controls">
        <button class="create">Create</button>
        <button class="start" disabled>Start</button>
        <button class="stop" disabled>Stop</button>
      </div>
      <div class="banner" hidden></div>
      <div class="status">no scenario</div>
    `;
    this.configEl = this.root.querySelector(".config") as HTMLTextAreaElement;
    this.configEl.value = JSON.stringify(
      {
        network: "data/fixtures/route_network.jsonl",
        duration_s: 7200,
        aggregation_window_s: 360,
        traffic_level: "low",
      },
      null,
      2,
    );
    this.bannerEl = this.root.querySelector(".banner") as HTMLElement;
    this.statusEl = this.root.querySelector(".status") as HTMLElement;
    this.button(".create").addEventListener("click", () => this.create());
    this.button(".start").addEventListener("click", () => this.start());
    this.button(".stop").addEventListener("click", () => this.stop());
  }

  private button(selector: string): HTMLButtonElement {
    return this.root.querySelector(selector) as HTMLButtonElement;
  }

  private showBanner(text: string): void {
    this.bannerEl.hidden = false;
    this.bannerEl.textContent = text;
  }

  private clearBanner(): void {
    this.bannerEl.hidden = true;
    this.bannerEl.textContent = "";
  }

  async create(): Promise<void> {
    this.clearBanner();
    let config: unknown;
    try {
      config = JSON.parse(this.configEl.value);
    } catch {
      this.showBanner("config is not valid JSON");
      return;
    }
    try {
      const created = await this.api.createScenario(config);
      this.scenarioId = created.scenario_id;
      this.statusEl.textContent =
        `scenario ${created.scenario_id}: ${created.status} ` +
        `(${created.nodes} nodes, ${created.edges} edges, ` +
        `${created.stations} stations)`;
      this.button(".start").disabled = false;
      this.button(".stop").disabled = false;
    } catch (err) {
      if (err instanceof ApiError) {
        // field-level validation messages come straight from the server
        this.showBanner(`${err.code}: ${err.message}`);
      } else {
        this.showBanner(String(err));
      }
    }
  }

  async start(): Promise<void> {
    if (!this.scenarioId) return;
    this.clearBanner();
    try {
      const status = await this.api.startSimulation(this.scenarioId);
      this.statusEl.textContent = `scenario ${this.scenarioId}: ${status.status}`;
      this.pollStatus();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.showBanner(`conflict: ${err.message}`);
      } else if (err instanceof ApiError) {
        this.showBanner(`${err.code}: ${err.message}`);
      }
    }
  }

  async stop(): Promise<void> {
    if (!this.scenarioId) return;
    this.clearBanner();
    try {
      const status = await this.api.stopSimulation(this.scenarioId);
      this.statusEl.textContent = `scenario ${this.scenarioId}: ${status.status}`;
      this.stopPolling();
    } catch (err) {
      if (err instanceof ApiError) this.showBanner(`${err.code}: ${err.message}`);
    }
  }

  private pollStatus(): void {
    this.stopPolling();
    this.poller = setInterval(async () => {
      if (!this.scenarioId) return;
      const status = await this.api.simulationStatus(this.scenarioId);
      this.statusEl.textContent = `scenario ${this.scenarioId}: ${status.status}`;
      if (status.status !== "running") this.stopPolling();
    }, 2000);
  }

  private stopPolling(): void {
    if (this.poller !== null) {
      clearInterval(this.poller);
      this.poller = null;
    }
  }
}

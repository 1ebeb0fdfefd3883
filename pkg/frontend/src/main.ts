// Page assembly: one tab per console, all talking to the same API base.

import { ApiClient } from "./api";
import { EvalReportView } from "./evalReport";
import { QueryConsole } from "./queryConsole";
import { RouteConsole } from "./routeConsole";
import { ScenarioPanel } from "./scenarioPanel";
import { TrafficMap } from "./trafficMap";
import type { WindowPayload } from "./types";

export function mountDashboard(container: HTMLElement,
                               api: ApiClient = new ApiClient()): void {
  const doc = container.ownerDocument;
  const panels = {
    scenario: new ScenarioPanel(api, doc),
    traffic: new TrafficMap(doc),
    route: new RouteConsole(api, doc),
    query: new QueryConsole(api, doc),
    eval: new EvalReportView(api, doc),
  };

  const nav = doc.createElement("nav");
  const content = doc.createElement("main");
  container.append(nav, content);

  const order: (keyof typeof panels)[] =
    ["scenario", "traffic", "route", "query", "eval"];
  for (const key of order) {
    const button = doc.createElement("button");
    button.textContent = key;
    button.dataset.tab = key;
    button.addEventListener("click", () => {
      content.replaceChildren(panels[key].root);
    });
    nav.appendChild(button);
  }
  content.replaceChildren(panels.scenario.root);

  // live map updates; cancel-safe on page teardown
  const stop = api.streamTraffic((payload) => {
    panels.traffic.applyWindow(payload as WindowPayload);
  });
  doc.defaultView?.addEventListener("beforeunload", () => {
    stop();
    panels.traffic.markDisconnected();
  });
}

declare global {
  interface Window {
    __ehubsimMounted?: boolean;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")
    && !window.__ehubsimMounted) {
  window.__ehubsimMounted = true;
  mountDashboard(document.getElementById("app") as HTMLElement);
}

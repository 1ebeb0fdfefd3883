// Mode colors follow the route-display convention: walking green,
// e-scooter red, extended with blue e-bikes and orange e-cars.

import type { TransportMode } from "./types";

export const MODE_COLORS: Record<TransportMode, string> = {
  walk: "#2e7d32",
  escooter: "#c62828",
  ebike: "#1565c0",
  ecar: "#ef6c00",
};

export const MODE_LABELS: Record<TransportMode, string> = {
  walk: "Walk",
  escooter: "E-Scooter",
  ebike: "E-Bike",
  ecar: "E-Car",
};

/** Color for a congestion level given current and free-flow speed. */
export function speedColor(speed: number | null, freeFlow: number | null): string {
  if (speed === null || freeFlow === null || freeFlow <= 0) {
    return "#9e9e9e"; // class not allowed here
  }
  const ratio = Math.max(0, Math.min(1, speed / freeFlow));
  // green (free flow) -> yellow -> red (jammed)
  const hue = ratio * 120;
  return `hsl(${Math.round(hue)}, 80%, 45%)`;
}

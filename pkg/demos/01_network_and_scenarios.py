"""Build a synthetic road network and load a scenario around it.

Generates a seeded 6x6 grid, writes a scenario file with the default
demand profiles, and shows what the loader validates and fills in.
"""

import json
import tempfile
from pathlib import Path

from ehubsim.network import (
    build_graph,
    generate_synthetic_grid,
    load_scenario,
)

workdir = Path(tempfile.mkdtemp(prefix="ehubsim-demo-"))

net_path = workdir / "grid.jsonl"
net_path.write_text(generate_synthetic_grid(6, 6, seed=11), encoding="utf-8")
print(f"network file: {net_path}")

scenario_path = workdir / "scenario.json"
scenario_path.write_text(json.dumps({
    "network": str(net_path),
    "duration_s": 7200,
    "aggregation_window_s": 360,
    "traffic_level": "medium",
    "stations": {"count": 8, "strategy": "degree_weighted", "seed": 3},
}, indent=2), encoding="utf-8")

config = load_scenario(scenario_path)
print(f"duration: {config.duration_s} s, window: {config.aggregation_window_s} s,"
      f" level: {config.traffic_level.value}"
      f" (demand multiplier {config.demand_multiplier})")

for cls, schedule in sorted(config.demand.items(), key=lambda kv: kv[0].value):
    print(f"demand[{cls.value}]: "
          + ", ".join(f"[{int(s)}, {int(e)}) every {p}s"
                      for s, e, p in schedule.intervals))

graph = build_graph(config)
print(f"graph: {len(graph.nodes)} nodes, {len(graph.edges)} directed edges")
sample = graph.edges[0]
print(f"sample edge {sample.edge_id}: {sample.length_m} m, "
      f"free-flow speeds {dict((c.value, v) for c, v in sample.free_flow_mps.items())}")

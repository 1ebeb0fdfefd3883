"""Regenerate the demo fixture tables, QA corpus, and replay cassettes.

Everything written here is deterministic: fixture tables are literal rows,
cassette keys are sha256 hashes of prompts built from the fixture store
with the default hashing embedding provider, and the fixture embedding
file pins retrieval rankings for the replayed query demo.

Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from ehubsim.embeddings import HashingEmbeddingProvider, text_digest  # noqa: E402
from ehubsim.rag import RagPipeline, build_prompt, prompt_hash  # noqa: E402
from ehubsim.store import Datastore  # noqa: E402

DATA = ROOT / "data"
FIXTURES = DATA / "fixtures"
CASSETTES = DATA / "cassettes"


# --- fixture tables ----------------------------------------------------------

STATION_ROWS = [
    # E3 hosts the most vehicles; 7 docked vehicles in total
    ("ST1", "E3", "VB1", "ebike", 90.0),
    ("ST1", "E3", "VB2", "ebike", 20.0),
    ("ST1", "E3", "VS1", "escooter", 70.0),
    ("ST2", "E1", "VB3", "ebike", 80.0),
    ("ST2", "E1", "VC1", "ecar", 95.0),
    ("ST3", "E5", "VS2", "escooter", 55.0),
    ("ST4", "E7", "VB4", "ebike", 60.0),
]

USER_PATH_ROWS = [
    # (path_id, start, end, time_cost_s, execution_time_ms, sequence)
    (1, "E1", "E9", 400.0, 12.5,
     "(E2,walk),(E3,escooter),(E4,escooter),(E5,escooter),(E9,walk)"),
    (2, "E2", "E9", 210.5, 8.0, "(E3,walk),(E9,walk)"),
    (3, "E1", "E9", 330.0, 9.75, "(E2,ebike),(E6,ebike),(E9,walk)"),
    (4, "E4", "E9", 505.25, 15.0, "(E5,walk),(E6,walk),(E7,walk),(E9,walk)"),
    (5, "E3", "E2", 95.0, 5.5, "(E2,walk)"),
    (6, "E5", "E2", 180.0, 7.25, "(E6,escooter),(E2,walk)"),
    (7, "E7", "E2", 205.0, 8.5, "(E8,walk),(E2,walk)"),
    (8, "E1", "E5", 150.75, 6.0, "(E4,walk),(E5,walk)"),
    (9, "E6", "E5", 260.0, 10.0, "(E7,ebike),(E5,walk)"),
    (10, "E8", "E1", 310.5, 11.25, "(E9,ecar),(E1,walk)"),
]


def online_demo_rows() -> list[tuple]:
    rows = []
    for w, window in enumerate((0, 360, 720)):
        for i in range(1, 11):
            edge = f"E{i}"
            ped = round(1.2 + 0.01 * i - 0.02 * w, 3)
            bike = round(4.0 + 0.1 * i - 0.05 * w, 3)
            car = None if edge == "E2" else round(8.0 + 0.5 * i - 0.25 * w, 3)
            rows.append((edge, window, ped, bike, car))
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


ROUTE_NETWORK = [
    {"type": "node", "id": "A", "x": 0.0, "y": 0.0},
    {"type": "node", "id": "B", "x": 140.0, "y": 0.0},
    {"type": "node", "id": "C", "x": 440.0, "y": 0.0},
    {"type": "node", "id": "D", "x": 1040.0, "y": 0.0},
    {"type": "node", "id": "E", "x": 1240.0, "y": 0.0},
    {"type": "edge", "id": "E1", "from": "A", "to": "B", "length_m": 140.0,
     "free_flow_mps": {"pedestrian": 1.0},
     "allowed_classes": ["pedestrian"], "jam_density": {"pedestrian": 2.0}},
    {"type": "edge", "id": "E2", "from": "B", "to": "C", "length_m": 300.0,
     "free_flow_mps": {"pedestrian": 1.0, "bicycle": 6.0},
     "allowed_classes": ["pedestrian", "bicycle"],
     "jam_density": {"pedestrian": 2.0, "bicycle": 0.35}},
    {"type": "edge", "id": "E3", "from": "C", "to": "D", "length_m": 600.0,
     "free_flow_mps": {"pedestrian": 1.0, "bicycle": 6.0},
     "allowed_classes": ["pedestrian", "bicycle"],
     "jam_density": {"pedestrian": 2.0, "bicycle": 0.35}},
    {"type": "edge", "id": "E4", "from": "D", "to": "E", "length_m": 200.0,
     "free_flow_mps": {"pedestrian": 1.0},
     "allowed_classes": ["pedestrian"], "jam_density": {"pedestrian": 2.0}},
]

ROUTE_STATIONS = [
    {"station_id": "STA", "edge_id": "E2", "capacity": 4,
     "inventory": [{"type": "escooter", "battery": 80.0}]},
    {"station_id": "STB", "edge_id": "E3", "capacity": 4, "inventory": []},
]


# --- QA corpus -----------------------------------------------------------------

SYSTEM_CASES = [
    ("S01", "How many traffic records are stored?",
     "SELECT COUNT(*) FROM online_demo;"),
    ("S02", "Which edge_id has the most stations?",
     "SELECT edge_id, COUNT(*) AS station_count FROM stations "
     "GROUP BY edge_id ORDER BY station_count DESC LIMIT 1;"),
    ("S03", "How many vehicles are docked in total?",
     "SELECT COUNT(*) FROM stations;"),
    ("S04", "List the distinct vehicle types available at stations.",
     "SELECT DISTINCT vehicle_type FROM stations ORDER BY vehicle_type;"),
    ("S05", "What is the average battery level across all docked vehicles?",
     "SELECT AVG(battery_level) FROM stations;"),
    ("S06", "Get the average bike speed for the road segments that have at "
            "least one station.",
     "SELECT o.edge_id, AVG(o.bike_speed) AS avg_bike_speed FROM online_demo o "
     "JOIN stations s ON o.edge_id = s.edge_id GROUP BY o.edge_id;"),
    ("S07", "What is the average car speed per edge?",
     "SELECT edge_id, AVG(car_speed) AS avg_car_speed FROM online_demo "
     "GROUP BY edge_id;"),
    ("S08", "Which edge recorded the lowest car speed?",
     "SELECT edge_id FROM online_demo WHERE car_speed IS NOT NULL "
     "ORDER BY car_speed ASC LIMIT 1;"),
    ("S09", "How many e-bikes are docked?",
     "SELECT COUNT(*) FROM stations WHERE vehicle_type = 'ebike';"),
    ("S10", "What is the maximum pedestrian speed observed?",
     "SELECT MAX(pedestrian_speed) FROM online_demo;"),
    ("S11", "How many stations are deployed?",
     "SELECT COUNT(DISTINCT station_id) FROM stations;"),
    ("S12", "Show the mean bike speed for each simulation window.",
     "SELECT simulation_time, AVG(bike_speed) AS avg_bike FROM online_demo "
     "GROUP BY simulation_time;"),
    ("S13", "Which vehicles have battery below 50 percent?",
     "SELECT vehicle_id FROM stations WHERE battery_level < 50;"),
    ("S14", "Count the traffic records per edge.",
     "SELECT edge_id, COUNT(*) AS n FROM online_demo GROUP BY edge_id;"),
    ("S15", "Which edges have an average car speed above 10?",
     "SELECT edge_id FROM online_demo GROUP BY edge_id "
     "HAVING AVG(car_speed) > 10;"),
    ("S16", "Which e-scooter has the highest battery level?",
     "SELECT vehicle_id FROM stations WHERE vehicle_type = 'escooter' "
     "ORDER BY battery_level DESC LIMIT 1;"),
    ("S17", "What is the average pedestrian speed on edges that have stations?",
     "SELECT AVG(pedestrian_speed) FROM online_demo "
     "WHERE edge_id IN (SELECT edge_id FROM stations);"),
    ("S18", "How many aggregation windows are recorded?",
     "SELECT COUNT(DISTINCT simulation_time) FROM online_demo;"),
    ("S19", "Which station has the most vehicles docked?",
     "SELECT station_id, COUNT(*) AS n FROM stations GROUP BY station_id "
     "ORDER BY n DESC LIMIT 1;"),
    ("S20", "Which edges ever had a bike speed below 4.2?",
     "SELECT DISTINCT edge_id FROM online_demo WHERE bike_speed < 4.2 "
     "ORDER BY edge_id;"),
    ("S21", "What is the minimum battery level among docked e-bikes?",
     "SELECT MIN(battery_level) FROM stations WHERE vehicle_type = 'ebike';"),
    ("S22", "How many edges have no car speed data at all?",
     "SELECT COUNT(DISTINCT edge_id) FROM online_demo WHERE car_speed IS NULL;"),
    ("S23", "List station identifiers with their edge, ordered by station.",
     "SELECT DISTINCT station_id, edge_id FROM stations ORDER BY station_id;"),
    ("S24", "What is the total battery capacity percentage docked per edge?",
     "SELECT edge_id, SUM(battery_level) AS total_battery FROM stations "
     "GROUP BY edge_id ORDER BY edge_id;"),
    ("S25", "Show the car speed history for edge E3 in time order.",
     "SELECT simulation_time, car_speed FROM online_demo WHERE edge_id = 'E3' "
     "ORDER BY simulation_time;"),
    ("S26", "Which edge has the highest average bike speed?",
     "SELECT edge_id FROM online_demo GROUP BY edge_id "
     "ORDER BY AVG(bike_speed) DESC LIMIT 1;"),
    ("S27", "How many vehicles are docked on edge E3?",
     "SELECT COUNT(*) FROM stations WHERE edge_id = 'E3';"),
    ("S28", "What is the average battery level per vehicle type?",
     "SELECT vehicle_type, AVG(battery_level) AS avg_battery FROM stations "
     "GROUP BY vehicle_type ORDER BY vehicle_type;"),
    ("S29", "At the first window, which edges had a car speed above 10?",
     "SELECT edge_id FROM online_demo WHERE simulation_time = 0 "
     "AND car_speed > 10 ORDER BY edge_id;"),
    ("S30", "How far is each edge's latest car speed from 10 m/s?",
     "SELECT edge_id, ABS(car_speed - 10) AS gap FROM online_demo "
     "WHERE simulation_time = 720 AND car_speed IS NOT NULL ORDER BY edge_id;"),
    ("S31", "Which edges have both a station and an average bike speed above 4.3?",
     "SELECT o.edge_id FROM online_demo o JOIN stations s "
     "ON o.edge_id = s.edge_id GROUP BY o.edge_id "
     "HAVING AVG(o.bike_speed) > 4.3 ORDER BY o.edge_id;"),
    ("S32", "Count docked vehicles per vehicle type.",
     "SELECT vehicle_type, COUNT(*) AS n FROM stations GROUP BY vehicle_type "
     "ORDER BY vehicle_type;"),
    ("S33", "What is the lowest pedestrian speed in the latest window?",
     "SELECT MIN(pedestrian_speed) FROM online_demo WHERE simulation_time = 720;"),
    ("S34", "Which edges appear in the traffic table but host no station?",
     "SELECT DISTINCT edge_id FROM online_demo WHERE edge_id NOT IN "
     "(SELECT edge_id FROM stations) ORDER BY edge_id;"),
    ("S35", "What is the mean car speed over the whole run?",
     "SELECT AVG(car_speed) FROM online_demo;"),
    ("S36", "Show each edge's bike speed range.",
     "SELECT edge_id, MAX(bike_speed) - MIN(bike_speed) AS speed_range "
     "FROM online_demo GROUP BY edge_id ORDER BY edge_id;"),
    ("S37", "How many station rows are on edges E1 or E3?",
     "SELECT COUNT(*) FROM stations WHERE edge_id = 'E1' OR edge_id = 'E3';"),
    ("S38", "Which window had the highest mean car speed?",
     "SELECT simulation_time FROM online_demo GROUP BY simulation_time "
     "ORDER BY AVG(car_speed) DESC LIMIT 1;"),
    ("S39", "List e-bike identifiers by descending battery level.",
     "SELECT vehicle_id FROM stations WHERE vehicle_type = 'ebike' "
     "ORDER BY battery_level DESC;"),
    ("S40", "What is the average bike speed on edge E5?",
     "SELECT AVG(bike_speed) FROM online_demo WHERE edge_id = 'E5';"),
]

USER_CASES = [
    ("U01", "Find the top 3 most frequent destinations.",
     "SELECT end_edge, COUNT(*) AS freq FROM user_paths GROUP BY end_edge "
     "ORDER BY freq DESC LIMIT 3;"),
    ("U02", "Find paths where the optimal route contains more than 4 road "
            "segments.",
     "SELECT * FROM user_paths WHERE LENGTH(optimal_path_sequence) - "
     "LENGTH(REPLACE(optimal_path_sequence, '(', '')) > 4;"),
    ("U03", "How many trips are recorded?",
     "SELECT COUNT(*) FROM user_paths;"),
    ("U04", "What is the average travel time in seconds?",
     "SELECT AVG(time_cost_s) FROM user_paths;"),
    ("U05", "Which trip took the longest?",
     "SELECT path_id FROM user_paths ORDER BY time_cost_s DESC LIMIT 1;"),
    ("U06", "List the distinct start edges of my trips.",
     "SELECT DISTINCT start_edge FROM user_paths ORDER BY start_edge;"),
    ("U07", "Show all trips that started at edge E1.",
     "SELECT * FROM user_paths WHERE start_edge = 'E1';"),
    ("U08", "What is the total time spent traveling?",
     "SELECT SUM(time_cost_s) FROM user_paths;"),
    ("U09", "What was the fastest solver execution time?",
     "SELECT MIN(execution_time_ms) FROM user_paths;"),
    ("U10", "How many trips went from E1 to E9?",
     "SELECT COUNT(*) FROM user_paths WHERE start_edge = 'E1' "
     "AND end_edge = 'E9';"),
    ("U11", "Which destinations have I visited, without duplicates?",
     "SELECT DISTINCT end_edge FROM user_paths ORDER BY end_edge;"),
    ("U12", "Show trips longer than 300 seconds.",
     "SELECT path_id, time_cost_s FROM user_paths WHERE time_cost_s > 300 "
     "ORDER BY path_id;"),
    ("U13", "What is the shortest trip time?",
     "SELECT MIN(time_cost_s) FROM user_paths;"),
    ("U14", "How many trips ended at each destination?",
     "SELECT end_edge, COUNT(*) AS n FROM user_paths GROUP BY end_edge "
     "ORDER BY end_edge;"),
    ("U15", "What is the average solver execution time?",
     "SELECT AVG(execution_time_ms) FROM user_paths;"),
    ("U16", "Show the trips that used an e-scooter leg.",
     "SELECT path_id FROM user_paths WHERE optimal_path_sequence "
     "LIKE '%escooter%' ORDER BY path_id;"),
    ("U17", "Which trips were within 100 seconds of 300 seconds travel time?",
     "SELECT path_id FROM user_paths WHERE ABS(time_cost_s - 300) < 100 "
     "ORDER BY path_id;"),
    ("U18", "How many trips start and end at different edges?",
     "SELECT COUNT(*) FROM user_paths WHERE start_edge <> end_edge;"),
    ("U19", "What is the longest optimal path sequence in characters?",
     "SELECT MAX(LENGTH(optimal_path_sequence)) FROM user_paths;"),
    ("U20", "List trips ordered by travel time, fastest first.",
     "SELECT path_id, time_cost_s FROM user_paths ORDER BY time_cost_s ASC;"),
    ("U21", "Show the three fastest trips.",
     "SELECT path_id FROM user_paths ORDER BY time_cost_s ASC LIMIT 3;"),
    ("U22", "Which start edge appears most often?",
     "SELECT start_edge, COUNT(*) AS n FROM user_paths GROUP BY start_edge "
     "ORDER BY n DESC LIMIT 1;"),
    ("U23", "How many of my trips ended at E9?",
     "SELECT COUNT(*) FROM user_paths WHERE end_edge = 'E9';"),
    ("U24", "What is the average travel time per destination?",
     "SELECT end_edge, AVG(time_cost_s) AS avg_time FROM user_paths "
     "GROUP BY end_edge ORDER BY end_edge;"),
    ("U25", "Show trips where the solver took more than 10 milliseconds.",
     "SELECT path_id, execution_time_ms FROM user_paths "
     "WHERE execution_time_ms > 10 ORDER BY path_id;"),
    ("U26", "Count trips that include a walking leg.",
     "SELECT COUNT(*) FROM user_paths WHERE optimal_path_sequence "
     "LIKE '%walk%';"),
    ("U27", "How many road segments does each optimal route contain?",
     "SELECT path_id, LENGTH(optimal_path_sequence) - "
     "LENGTH(REPLACE(optimal_path_sequence, '(', '')) AS segments "
     "FROM user_paths ORDER BY path_id;"),
    ("U28", "What is the total solver execution time across trips?",
     "SELECT SUM(execution_time_ms) FROM user_paths;"),
    ("U29", "Which trips passed through edge E6?",
     "SELECT path_id FROM user_paths WHERE optimal_path_sequence "
     "LIKE '%(E6,%' ORDER BY path_id;"),
    ("U30", "Show each trip's endpoints.",
     "SELECT path_id, start_edge, end_edge FROM user_paths ORDER BY path_id;"),
    ("U31", "What is the average time of trips ending at E9?",
     "SELECT AVG(time_cost_s) FROM user_paths WHERE end_edge = 'E9';"),
    ("U32", "How many distinct destinations have I traveled to?",
     "SELECT COUNT(DISTINCT end_edge) FROM user_paths;"),
    ("U33", "List trips that used an e-car.",
     "SELECT path_id FROM user_paths WHERE optimal_path_sequence "
     "LIKE '%ecar%' ORDER BY path_id;"),
    ("U34", "Which trip had the slowest solver run?",
     "SELECT path_id FROM user_paths ORDER BY execution_time_ms DESC LIMIT 1;"),
    ("U35", "Show trips faster than 200 seconds that ended at E2.",
     "SELECT path_id FROM user_paths WHERE time_cost_s < 200 "
     "AND end_edge = 'E2' ORDER BY path_id;"),
    ("U36", "What is the median-free average: mean time of my five slowest trips?",
     "SELECT AVG(time_cost_s) FROM (SELECT time_cost_s FROM user_paths "
     "ORDER BY time_cost_s DESC LIMIT 5);"),
    ("U37", "How many trips started from each edge?",
     "SELECT start_edge, COUNT(*) AS n FROM user_paths GROUP BY start_edge "
     "ORDER BY start_edge;"),
    ("U38", "Which destination has the highest average travel time?",
     "SELECT end_edge FROM user_paths GROUP BY end_edge "
     "ORDER BY AVG(time_cost_s) DESC LIMIT 1;"),
    ("U39", "Show the trips whose route has exactly 2 segments.",
     "SELECT path_id FROM user_paths WHERE LENGTH(optimal_path_sequence) - "
     "LENGTH(REPLACE(optimal_path_sequence, '(', '')) = 2 ORDER BY path_id;"),
    ("U40", "What fraction of a minute was the average solver time? ",
     "SELECT AVG(execution_time_ms) / 60000.0 FROM user_paths;"),
]

# Golden 20-case cassette: per 10-case slice, cases 9 and 10 answer wrongly.
WRONG_ANSWERS = {
    "S09": "SELECT COUNT(*) FROM stations WHERE vehicle_type = 'escooter';",
    "S10": "SELECT MIN(pedestrian_speed) FROM online_demo;",
    "U09": "SELECT MAX(execution_time_ms) FROM user_paths;",
    "U10": "SELECT COUNT(*) FROM user_paths WHERE start_edge = 'E2' "
           "AND end_edge = 'E9';",
}

# The replayed dashboard/service demo question and its answer.
DEMO_QUESTION = "Find the top 3 most frequent destinations."
DEMO_SQL = ("SELECT end_edge, COUNT(*) AS freq FROM user_paths "
            "GROUP BY end_edge ORDER BY freq DESC LIMIT 3;")


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def build_fixture_store() -> Datastore:
    store = Datastore()
    store.init_schema()
    store.seed_table_from_jsonl("online_demo", FIXTURES / "online_demo.jsonl")
    store.seed_table_from_jsonl("stations", FIXTURES / "stations.jsonl")
    store.seed_table_from_jsonl("user_paths", FIXTURES / "user_paths.jsonl")
    return store


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    CASSETTES.mkdir(parents=True, exist_ok=True)

    write_jsonl(FIXTURES / "stations.jsonl", [
        {"station_id": s, "edge_id": e, "vehicle_id": v, "vehicle_type": t,
         "battery_level": b} for s, e, v, t, b in STATION_ROWS])
    write_jsonl(FIXTURES / "user_paths.jsonl", [
        {"path_id": pid, "start_edge": s, "end_edge": e, "time_cost_s": t,
         "execution_time_ms": ms, "optimal_path_sequence": seq}
        for pid, s, e, t, ms, seq in USER_PATH_ROWS])
    write_jsonl(FIXTURES / "online_demo.jsonl", [
        {"edge_id": e, "simulation_time": w, "pedestrian_speed": p,
         "bike_speed": b, "car_speed": c} for e, w, p, b, c in online_demo_rows()])
    write_jsonl(FIXTURES / "route_network.jsonl", ROUTE_NETWORK)
    (FIXTURES / "route_stations.json").write_text(
        json.dumps(ROUTE_STATIONS, indent=2) + "\n", encoding="utf-8")

    corpus = []
    for case_id, question, sql in SYSTEM_CASES:
        corpus.append({"case_id": case_id, "user_class": "system_operator",
                       "question": question, "gold_sql": sql, "db": "platform"})
    for case_id, question, sql in USER_CASES:
        corpus.append({"case_id": case_id, "user_class": "user",
                       "question": question, "gold_sql": sql, "db": "platform"})
    write_jsonl(DATA / "qa_corpus.jsonl", corpus)

    golden_ids = [f"S{i:02d}" for i in range(1, 11)] + \
                 [f"U{i:02d}" for i in range(1, 11)]
    golden = [c for c in corpus if c["case_id"] in golden_ids]
    write_jsonl(DATA / "qa_golden20.jsonl", golden)

    # cassettes need the exact prompts the pipeline will build
    store = build_fixture_store()
    pipeline = RagPipeline(store, HashingEmbeddingProvider())

    def prompt_for(question: str) -> str:
        docs = [r.doc for r in pipeline.retrieve(question)]
        return build_prompt(question, docs)

    all_gold = {}
    for case in corpus:
        all_gold[prompt_hash(prompt_for(case["question"]))] = case["gold_sql"]
    (CASSETTES / "all_gold.json").write_text(
        json.dumps(all_gold, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    golden20 = {}
    for case in golden:
        answer = WRONG_ANSWERS.get(case["case_id"], case["gold_sql"])
        golden20[prompt_hash(prompt_for(case["question"]))] = answer
    (CASSETTES / "golden_20.json").write_text(
        json.dumps(golden20, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    # frozen prompt bytes for the demo question under the default provider
    (FIXTURES / "golden_prompt.txt").write_text(
        prompt_for(DEMO_QUESTION), encoding="utf-8")

    # exact-match embedding fixture: question aligned with the user_paths doc
    doc_vectors = {
        "user_paths": [0.95, 0.05, 0.0, 0.0],
        "stations": [0.1, 0.9, 0.0, 0.0],
        "online_demo": [0.0, 0.0, 1.0, 0.0],
    }
    fixture_vectors = {text_digest(DEMO_QUESTION): [1.0, 0.0, 0.0, 0.0]}
    docs_by_id = {d.doc_id: d for d in pipeline.docs}
    for doc_id, vec in doc_vectors.items():
        fixture_vectors[text_digest(docs_by_id[doc_id].text_form)] = vec
    (FIXTURES / "fixture_embeddings.json").write_text(
        json.dumps(fixture_vectors, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")

    # replay cassette for the demo question under the fixture embedding ranking
    ranked = sorted(doc_vectors.items(),
                    key=lambda kv: -kv[1][0] / (sum(x * x for x in kv[1]) ** 0.5))
    demo_prompt = build_prompt(DEMO_QUESTION,
                               [docs_by_id[doc_id] for doc_id, _ in ranked])
    (CASSETTES / "fixture_query.json").write_text(
        json.dumps({prompt_hash(demo_prompt): DEMO_SQL}, indent=2) + "\n",
        encoding="utf-8")

    # sanity: every gold query must execute on the fixture store
    for case in corpus:
        store.execute_sql(case["gold_sql"])
    for sql in WRONG_ANSWERS.values():
        store.execute_sql(sql)

    print(f"fixtures written under {DATA}")


if __name__ == "__main__":
    main()

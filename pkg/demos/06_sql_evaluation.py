"""The SQL evaluation suite end to end.

Scores the 20-case golden corpus against a cassette that answers two of
each ten cases wrongly: execution accuracy lands at exactly 0.8 per user
class, surface metrics are medians, and each failed case gets one label
from the error taxonomy (QSD, QLE, RPE, RGE).
"""

from pathlib import Path

from ehubsim.embeddings import HashingEmbeddingProvider
from ehubsim.evalsuite import load_corpus, run_evaluation
from ehubsim.rag import RagPipeline, ReplayBackend
from ehubsim.store import Datastore

root = Path(__file__).resolve().parent.parent
fixtures = root / "data" / "fixtures"

store = Datastore()
store.init_schema()
for table in ("online_demo", "stations", "user_paths"):
    store.seed_table_from_jsonl(table, fixtures / f"{table}.jsonl")

pipeline = RagPipeline(store, HashingEmbeddingProvider())
backend = ReplayBackend(root / "data" / "cassettes" / "golden_20.json")
cases = load_corpus(root / "data" / "qa_golden20.jsonl")

report = run_evaluation(cases, pipeline.predictor(backend), store,
                        model="replay-golden")

print(report.to_csv())
for s in report.slices:
    print(f"{s.user_class}: accuracy {s.execution_accuracy:.2f} over "
          f"{s.case_count} cases")
    print(f"  metric medians: "
          + ", ".join(f"{k}={v:.3f}" for k, v in s.metric_medians.items()))
    print(f"  error proportions: {s.error_proportions}")

print("\nfailed cases and their labels:")
for case in report.cases:
    if not case.execution_match:
        print(f"  {case.case_id} [{case.error_type}]: {case.predicted_sql}")

heat = report.heatmap_data()
print(f"\nheatmap rows (order {heat['error_types']}):")
for row in heat["rows"]:
    cells = " ".join(f"{v:.2f}" for v in row["proportions"])
    print(f"  {row['model']}/{row['user_class']}: {cells}")

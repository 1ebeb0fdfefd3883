"""Schema-retrieval text-to-SQL over the demo database, fully offline.

Schema documents are generated from the live store, embedded with the
deterministic hashing provider, and retrieved by cosine similarity; SQL
comes from a frozen replay cassette so the whole loop runs without a
network or model weights. A live chat-completions backend plugs into the
same pipeline via HttpLlmBackend.
"""

from pathlib import Path

from ehubsim.embeddings import HashingEmbeddingProvider
from ehubsim.rag import RagPipeline, ReplayBackend
from ehubsim.store import Datastore

root = Path(__file__).resolve().parent.parent
fixtures = root / "data" / "fixtures"

store = Datastore()
store.init_schema()
for table in ("online_demo", "stations", "user_paths"):
    store.seed_table_from_jsonl(table, fixtures / f"{table}.jsonl")

pipeline = RagPipeline(store, HashingEmbeddingProvider())

print("schema documents generated from the store:")
for doc in pipeline.docs:
    first_line = doc.text_form.splitlines()[1]
    print(f"  {doc.doc_id}: {first_line[:74]}")

backend = ReplayBackend(root / "data" / "cassettes" / "all_gold.json")

for question in (
    "Find the top 3 most frequent destinations.",
    "Which edge_id has the most stations?",
    "What is the average battery level across all docked vehicles?",
):
    answer = pipeline.answer(question, backend)
    print(f"\nQ: {question}")
    ranked = ", ".join(f"{r.doc.doc_id} ({r.score:.3f})"
                       for r in answer.retrieved)
    print(f"retrieved: {ranked}")
    print(f"SQL: {answer.sql}")
    print(f"-> columns {answer.result.columns}")
    for row in answer.result.rows:
        print(f"   {row}")

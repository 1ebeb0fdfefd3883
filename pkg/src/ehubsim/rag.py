"""Schema-retrieval text-to-SQL pipeline.

Schema documents are embedded and indexed; a question retrieves the top-k
most similar documents, which are concatenated into a versioned prompt for
a pluggable SQL-generation backend. The replay backend answers from a
frozen prompt-hash -> response cassette, so the whole pipeline runs
deterministically offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .embeddings import (
    EmbeddingProvider,
    VectorIndex,
    cosine_similarity,
)
from .errors import (
    BackendUnavailable,
    CassetteMiss,
    EmptyIndex,
    NonSqlOutput,
)
from .mschema import MSchemaDoc, generate_mschema
from .store import Datastore, ResultTable

PROMPT_TEMPLATE_VERSION = "v1"

_PROMPT_HEADER = (
    "-- text2sql prompt {version}\n"
    "You are a SQL assistant for a shared e-mobility platform database.\n"
    "Generate exactly one executable SQL SELECT statement that answers the\n"
    "question, using only the tables described below. Reply with SQL only.\n"
)


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def build_prompt(question: str, docs: Sequence[MSchemaDoc],
                 version: str = PROMPT_TEMPLATE_VERSION) -> str:
    """Deterministic, byte-stable prompt: header, docs in rank order, question."""
    if not docs:
        raise ValueError("build_prompt needs at least one schema document")
    parts = [_PROMPT_HEADER.format(version=version)]
    for doc in docs:
        parts.append(doc.text_form + "\n")
    parts.append(f"Question: {question}\nSQL:")
    return "\n".join(parts)


def extract_sql(response: str) -> str:
    """First SQL statement of a model response, markdown fences stripped.

    Responses carrying more than one statement are rejected: the contract
    is one SQL statement per answer.
    """
    text = response.strip()
    fence = re.match(r"^```[a-zA-Z]*\s(.*?)```$", text, re.DOTALL)
    if fence:
        text = fence.group(1).strip()
    if not text:
        raise NonSqlOutput("backend returned no SQL")
    statements = [s.strip() for s in _split_statements(text) if s.strip()]
    if len(statements) != 1:
        raise NonSqlOutput(
            f"expected one SQL statement, got {len(statements)}")
    return statements[0]


def _split_statements(text: str) -> list[str]:
    parts, buf, in_str = [], [], False
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if in_str:
            buf.append(ch)
            if ch == "'":
                if i + 1 < n and text[i + 1] == "'":
                    buf.append("'")
                    i += 1
                else:
                    in_str = False
        elif ch == "'":
            in_str = True
            buf.append(ch)
        elif ch == ";":
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


class LlmBackend(Protocol):
    backend_id: str

    def generate(self, prompt: str) -> str: ...


class ReplayBackend:
    """Deterministic, network-free backend: sha256(prompt) -> response."""

    def __init__(self, cassette: str | Path | dict, backend_id: str = "replay"):
        if isinstance(cassette, dict):
            self._cassette = dict(cassette)
            self.cassette_path = None
        else:
            self.cassette_path = Path(cassette)
            self._cassette = json.loads(
                self.cassette_path.read_text(encoding="utf-8"))
        self.backend_id = backend_id

    def generate(self, prompt: str) -> str:
        key = prompt_hash(prompt)
        if key not in self._cassette:
            raise CassetteMiss(f"cassette has no entry for prompt sha256 {key}")
        return extract_sql(self._cassette[key])


class HttpLlmBackend:
    """Chat-completions client for a live SQL-generation model."""

    def __init__(self, url: str, model: str, api_key_env: str = "LLM_API_KEY",
                 timeout: float = 60.0, transport=None):
        import httpx
        self.backend_id = model
        self._url = url
        self._model = model
        key = os.environ.get(api_key_env, "")
        self._client = httpx.Client(
            timeout=timeout,
            transport=transport,
            headers={"Authorization": f"Bearer {key}"} if key else {},
        )

    def generate(self, prompt: str) -> str:
        try:
            resp = self._client.post(self._url, json={
                "model": self._model,
                "messages": [{"role": "user", "content": prompt}],
            })
            resp.raise_for_status()
            payload = resp.json()
        except Exception as exc:
            raise BackendUnavailable(f"llm endpoint failed: {exc}") from exc
        try:
            content = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable("llm response missing content") from exc
        return extract_sql(content)


@dataclass
class RetrievedDoc:
    doc: MSchemaDoc
    score: float


@dataclass
class RagAnswer:
    question: str
    retrieved: list[RetrievedDoc]
    prompt: str
    sql: str
    result: Optional[ResultTable] = None


class RagPipeline:
    """Ties the store's schema documents to retrieval and SQL generation."""

    def __init__(self, store: Datastore, provider: EmbeddingProvider, k: int = 3):
        self.store = store
        self.provider = provider
        self.k = k
        self._docs: Optional[list[MSchemaDoc]] = None
        self._index: Optional[VectorIndex] = None

    @property
    def docs(self) -> list[MSchemaDoc]:
        if self._docs is None:
            self._docs = generate_mschema(self.store)
        return self._docs

    @property
    def index(self) -> VectorIndex:
        if self._index is None:
            index = VectorIndex(self.provider.provider_id, self.provider.dimension)
            for doc in self.docs:
                index.add(doc.doc_id, self.provider.embed(doc.text_form),
                          metadata={"table": doc.table})
            self._index = index
        return self._index

    def invalidate(self) -> None:
        self._docs = None
        self._index = None

    def retrieve(self, question: str, k: Optional[int] = None) -> list[RetrievedDoc]:
        """Top-k schema documents by cosine similarity to the question."""
        if len(self.index) == 0:
            raise EmptyIndex("no schema documents indexed")
        qvec = self.provider.embed(question)
        ranked = self.index.query(qvec, k or self.k)
        by_id = {doc.doc_id: doc for doc in self.docs}
        return [RetrievedDoc(doc=by_id[doc_id], score=score)
                for doc_id, score in ranked]

    def recompute_score(self, question: str, doc_id: str) -> float:
        qvec = self.provider.embed(question)
        return cosine_similarity(qvec, self.index.entry(doc_id).vector)

    def answer(self, question: str, backend: LlmBackend,
               execute: bool = True) -> RagAnswer:
        retrieved = self.retrieve(question)
        prompt = build_prompt(question, [r.doc for r in retrieved])
        sql = backend.generate(prompt)
        result = self.store.execute_sql(sql) if execute else None
        return RagAnswer(question=question, retrieved=retrieved,
                         prompt=prompt, sql=sql, result=result)

    def predictor(self, backend: LlmBackend):
        """Case -> SQL callable for the evaluation harness."""
        def predict(case) -> str:
            retrieved = self.retrieve(case.question)
            prompt = build_prompt(case.question, [r.doc for r in retrieved])
            return backend.generate(prompt)
        return predict


def export_mschema_files(store: Datastore, out_dir: str | Path) -> list[Path]:
    """Write one M-Schema JSON file per table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for doc in generate_mschema(store):
        path = out / f"{doc.table}.json"
        path.write_text(doc.to_json() + "\n", encoding="utf-8")
        paths.append(path)
    return paths

"""Text embedding providers, cosine similarity, and the vector index.

The default provider is fully offline and deterministic: hashed
unigram+bigram features in a fixed-dimension space. A transformer or
hosted embedding service can be plugged in over HTTP behind the same
contract, and exact-match fixture providers support frozen test vectors.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyIndex,
    EmptyText,
    ProviderError,
    ZeroVector,
)

_WORD_RE = re.compile(r"\w+")


class EmbeddingProvider(Protocol):
    provider_id: str
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class HashingEmbeddingProvider:
    """Seeded feature hashing of lowercased word unigrams and bigrams."""

    def __init__(self, dimension: int = 384, seed: int = 0):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.provider_id = f"hashing-{dimension}-{seed}"
        self.dimension = dimension
        self.seed = seed

    def embed(self, text: str) -> np.ndarray:
        words = [w.lower() for w in _WORD_RE.findall(text)]
        if not words:
            raise EmptyText("cannot embed empty text")
        features = list(words)
        features.extend(f"{a} {b}" for a, b in zip(words, words[1:]))
        vec = np.zeros(self.dimension, dtype=np.float64)
        for feat in features:
            digest = hashlib.blake2b(
                f"{self.seed}:{feat}".encode("utf-8"), digest_size=8
            ).digest()
            h = int.from_bytes(digest, "big")
            sign = 1.0 if (h >> 63) & 1 else -1.0
            vec[h % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # all features cancelled; nudge the first hashed slot
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class FixtureEmbeddingProvider:
    """Exact-match provider: sha256(text) -> frozen vector.

    Used to pin retrieval rankings in tests and replayed demos.
    """

    def __init__(self, vectors: Mapping[str, Sequence[float]],
                 provider_id: str = "fixture"):
        if not vectors:
            raise ProviderError("fixture provider needs at least one vector")
        self._vectors = {k: np.asarray(v, dtype=np.float64)
                         for k, v in vectors.items()}
        dims = {v.shape[0] for v in self._vectors.values()}
        if len(dims) != 1:
            raise DimensionMismatch("fixture vectors have mixed dimensions")
        self.dimension = dims.pop()
        self.provider_id = provider_id

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureEmbeddingProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data)

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        digest = text_digest(text)
        if digest not in self._vectors:
            raise ProviderError(f"fixture provider has no vector for sha256 {digest}")
        return self._vectors[digest].copy()


class HttpEmbeddingProvider:
    """Embedding endpoint client (OpenAI-style /embeddings payload)."""

    def __init__(self, url: str, model: str, api_key: Optional[str] = None,
                 dimension: int = 384, timeout: float = 30.0, transport=None):
        import httpx
        self.provider_id = f"http:{model}"
        self.dimension = dimension
        self._url = url
        self._model = model
        self._client = httpx.Client(
            timeout=timeout,
            transport=transport,
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
        )

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        try:
            resp = self._client.post(self._url,
                                     json={"model": self._model, "input": text})
            resp.raise_for_status()
            payload = resp.json()
        except Exception as exc:
            raise ProviderError(f"embedding endpoint failed: {exc}") from exc
        try:
            if "data" in payload:
                values = payload["data"][0]["embedding"]
            else:
                values = payload["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("embedding response missing vector") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape[0] != self.dimension:
            self.dimension = vec.shape[0]
        return vec


def cosine_similarity(q: np.ndarray, d: np.ndarray) -> float:
    q = np.asarray(q, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if q.shape != d.shape:
        raise DimensionMismatch(f"vector dimensions differ: {q.shape} vs {d.shape}")
    qn = float(np.linalg.norm(q))
    dn = float(np.linalg.norm(d))
    if qn == 0.0 or dn == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.dot(q, d) / (qn * dn))


@dataclass
class IndexEntry:
    doc_id: str
    vector: np.ndarray
    metadata: dict = field(default_factory=dict)


class VectorIndex:
    """In-memory cosine index with deterministic tie-breaking by doc_id."""

    def __init__(self, provider_id: str, dimension: int):
        self.provider_id = provider_id
        self.dimension = dimension
        self._entries: dict[str, IndexEntry] = {}

    def add(self, doc_id: str, vector: np.ndarray, metadata: Optional[dict] = None) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise DimensionMismatch(
                f"index dimension {self.dimension}, vector {vec.shape}")
        if doc_id in self._entries:
            raise ValueError(f"duplicate doc_id {doc_id}")
        self._entries[doc_id] = IndexEntry(doc_id, vec, metadata or {})

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, doc_id: str) -> IndexEntry:
        return self._entries[doc_id]

    def query(self, vector: np.ndarray, k: int) -> list[tuple[str, float]]:
        """Top-k (doc_id, cosine) pairs, score descending, ties by doc_id."""
        if not self._entries:
            raise EmptyIndex("vector index is empty")
        scored = [
            (entry.doc_id, cosine_similarity(vector, entry.vector))
            for entry in self._entries.values()
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored[:k]

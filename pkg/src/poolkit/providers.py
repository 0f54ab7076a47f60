"""Embedding and relevance-scoring providers.

Models are external to this toolkit: they are reached over HTTP or replaced
by deterministic local stand-ins, so the whole pipeline can run offline.
"""

from __future__ import annotations

import hashlib
import math
from typing import Protocol, Sequence

import requests

from .analysis import DEFAULT_ANALYZER, AnalyzerConfig, analyze
from .errors import ProviderError


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class RelevanceScorer(Protocol):
    tag: str

    def score_pairs(
        self, topic_id: str, query_text: str, passages: Sequence[tuple[str, str]]
    ) -> list[float]: ...


def unit_vector(vec: Sequence[float]) -> list[float]:
    """L2-normalize a vector; a zero vector cannot be normalized and is a provider fault."""
    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0.0:
        raise ProviderError("provider returned a zero vector; cannot normalize")
    return [x / norm for x in vec]


class HashingEmbedder:
    """Deterministic bag-of-words embedding by feature hashing.

    Offline stand-in for a neural bi-encoder: each token is hashed into one of
    ``dimension`` buckets, so lexically similar texts get similar vectors.
    Token-less text maps to a fixed basis vector rather than a zero vector.
    """

    def __init__(self, dimension: int = 64, analyzer: AnalyzerConfig = DEFAULT_ANALYZER):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self.analyzer = analyzer

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._embed_one(t) for t in texts]

    def _embed_one(self, text: str) -> list[float]:
        vec = [0.0] * self.dimension
        tokens = analyze(text, self.analyzer)
        if not tokens:
            vec[0] = 1.0
            return vec
        for tok in tokens:
            digest = hashlib.blake2b(tok.encode("utf-8"), digest_size=8).digest()
            vec[int.from_bytes(digest, "big") % self.dimension] += 1.0
        return vec


class HttpEmbedder:
    """Client for an embedding service: POST {base_url}/embed {"texts": [...]}."""

    def __init__(self, base_url: str, dimension: int | None = None, timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.dimension = dimension
        self.timeout = timeout

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        try:
            resp = requests.post(
                f"{self.base_url}/embed", json={"texts": list(texts)}, timeout=self.timeout
            )
            resp.raise_for_status()
            vectors = resp.json()["vectors"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise ProviderError(f"embedding provider unreachable or malformed: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                f"embedding provider returned {len(vectors)} vectors for {len(texts)} texts"
            )
        if self.dimension is None and vectors:
            self.dimension = len(vectors[0])
        for v in vectors:
            if self.dimension is not None and len(v) != self.dimension:
                raise ProviderError(
                    f"embedding dimension mismatch: expected {self.dimension}, got {len(v)}"
                )
        return [[float(x) for x in v] for v in vectors]


class HttpScorer:
    """Client for a pair-scoring service: POST {base_url}/score, scores aligned by position."""

    def __init__(self, base_url: str, tag: str, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.tag = tag
        self.timeout = timeout

    def score_pairs(
        self, topic_id: str, query_text: str, passages: Sequence[tuple[str, str]]
    ) -> list[float]:
        body = {
            "query": query_text,
            "passages": [{"id": pid, "text": text} for pid, text in passages],
        }
        try:
            resp = requests.post(f"{self.base_url}/score", json=body, timeout=self.timeout)
            resp.raise_for_status()
            scores = resp.json()["scores"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise ProviderError(f"scoring provider unreachable or malformed: {exc}") from exc
        if len(scores) != len(passages):
            raise ProviderError(
                f"scoring provider returned {len(scores)} scores for {len(passages)} passages"
            )
        out = [float(s) for s in scores]
        if any(not math.isfinite(s) for s in out):
            raise ProviderError(f"scoring provider returned a non-finite score for {topic_id}")
        return out

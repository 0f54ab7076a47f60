"""Exact dense retrieval over unit vectors from a pluggable embedding provider.

At this corpus scale a full-scan inner product is both faster to build and
deterministic, so no approximate index is used. Vectors are L2-normalized on
receipt, making inner product equal to cosine similarity.

Vector file format: a header line ``dim=<d>``, then one line per passage:
``passage_id<TAB>f1 f2 ... fd`` with floats printed in round-trippable form.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Passage
from .errors import InputFormatError, ProviderError
from .providers import EmbeddingProvider
from .runs import RankedList, ranked_list_from_scores


class VectorStore:
    """Immutable ordinal -> unit vector store with an id map."""

    def __init__(self, ids: Sequence[str], matrix: np.ndarray):
        if len(ids) != matrix.shape[0]:
            raise ValueError(f"{len(ids)} ids for {matrix.shape[0]} vectors")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate passage ids in vector store")
        self.ids = list(ids)
        self.matrix = matrix.astype(np.float64, copy=False)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.ids)


def _normalize_rows(matrix: np.ndarray, ids: Sequence[str]) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ProviderError(f"zero vector for passage {ids[int(zero[0])]!r}; cannot normalize")
    # Rows already at unit norm are kept bit-identical so that writing and
    # re-reading a vector file round-trips exactly.
    needs = np.abs(norms - 1.0) > 1e-9
    if not needs.any():
        return matrix
    out = matrix.copy()
    out[needs] = matrix[needs] / norms[needs, None]
    return out


def embed_corpus(
    provider: EmbeddingProvider,
    passages: Sequence[Passage],
    batch_size: int = 64,
) -> VectorStore:
    """Embed every passage and normalize to unit length; batching never changes results."""
    ids = [p.passage_id for p in passages]
    vectors: list[list[float]] = []
    for start in range(0, len(passages), batch_size):
        batch = passages[start : start + batch_size]
        got = provider.embed([p.text for p in batch])
        if len(got) != len(batch):
            raise ProviderError(f"provider returned {len(got)} vectors for {len(batch)} texts")
        vectors.extend(got)
    if not vectors:
        return VectorStore([], np.zeros((0, 0)))
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise ProviderError("provider returned vectors of differing dimensions")
    return VectorStore(ids, _normalize_rows(matrix, ids))


def embed_query(provider: EmbeddingProvider, text: str) -> np.ndarray:
    vec = np.asarray(provider.embed([text])[0], dtype=np.float64)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ProviderError("zero query vector; cannot normalize")
    return vec / norm


def dense_search(
    store: VectorStore,
    query_vec: np.ndarray,
    k: int,
    topic_id: str = "q",
    system_tag: str = "dense",
) -> RankedList:
    """Exact top-k by inner product; k beyond the corpus returns the full ranking."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if len(store) == 0:
        return RankedList(topic_id, (), system_tag)
    if query_vec.shape != (store.dimension,):
        raise ValueError(
            f"query dimension {query_vec.shape} does not match store dimension {store.dimension}"
        )
    scores = store.matrix @ query_vec
    return ranked_list_from_scores(
        topic_id, zip(store.ids, scores.tolist()), system_tag, depth=k
    )


def write_vectors(store: VectorStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"dim={store.dimension}\n")
        for pid, row in zip(store.ids, store.matrix):
            fh.write(pid + "\t" + " ".join(repr(float(x)) for x in row) + "\n")


def read_vectors(path: str | Path, expected_ids: Sequence[str] | None = None) -> VectorStore:
    """Load a vector file; with expected_ids, any missing passage is an error."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise InputFormatError("missing dim=<d> header", path=path, line=1)
        try:
            dim = int(header[4:])
        except ValueError as exc:
            raise InputFormatError(f"bad dimension: {exc}", path=path, line=1) from exc
        ids: list[str] = []
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                pid, values = line.rstrip("\n").split("\t")
                row = [float(x) for x in values.split()]
            except ValueError as exc:
                raise InputFormatError(f"bad vector line: {exc}", path=path, line=lineno) from exc
            if len(row) != dim:
                raise InputFormatError(
                    f"vector for {pid!r} has {len(row)} components, expected {dim}",
                    path=path,
                    line=lineno,
                )
            ids.append(pid)
            rows.append(row)
    if expected_ids is not None:
        missing = sorted(set(expected_ids) - set(ids))
        if missing:
            raise InputFormatError(f"missing vector for passage {missing[0]!r}", path=path)
    matrix = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, dim))
    try:
        return VectorStore(ids, _normalize_rows(matrix, ids) if len(ids) else matrix)
    except ValueError as exc:
        raise InputFormatError(str(exc), path=path) from exc

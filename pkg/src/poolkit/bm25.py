"""Self-contained BM25 engine over an in-memory inverted index.

Scoring uses the Lucene variant: idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)),
which is never negative, with the usual (k1, b) length-normalized tf factor.
Defaults k1=0.9, b=0.4 match Pyserini/Anserini.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .analysis import DEFAULT_ANALYZER, AnalyzerConfig, analyze
from .corpus import Passage
from .errors import InputFormatError
from .runs import RankedList, ranked_list_from_scores


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[int, int]]]  # term -> [(ordinal, tf)], sorted by ordinal
    doc_lengths: list[int]
    ids: list[str]  # ordinal -> passage_id
    params: Bm25Params = field(default_factory=Bm25Params)
    analyzer: AnalyzerConfig = DEFAULT_ANALYZER

    @property
    def doc_count(self) -> int:
        return len(self.ids)

    @property
    def avg_doc_length(self) -> float:
        return sum(self.doc_lengths) / len(self.doc_lengths) if self.doc_lengths else 0.0

    def doc_frequency(self, term: str) -> int:
        return len(self.postings.get(term, ()))


def build_inverted_index(
    passages: Sequence[Passage],
    params: Bm25Params = Bm25Params(),
    analyzer: AnalyzerConfig = DEFAULT_ANALYZER,
) -> InvertedIndex:
    """Index passages; rejects duplicate passage ids."""
    postings: dict[str, dict[int, int]] = {}
    doc_lengths: list[int] = []
    ids: list[str] = []
    seen: set[str] = set()
    for ordinal, passage in enumerate(passages):
        if passage.passage_id in seen:
            raise ValueError(f"duplicate passage_id {passage.passage_id!r}")
        seen.add(passage.passage_id)
        ids.append(passage.passage_id)
        tokens = analyze(passage.text, analyzer)
        doc_lengths.append(len(tokens))
        for token in tokens:
            term = postings.setdefault(token, {})
            term[ordinal] = term.get(ordinal, 0) + 1
    return InvertedIndex(
        postings={t: sorted(freqs.items()) for t, freqs in postings.items()},
        doc_lengths=doc_lengths,
        ids=ids,
        params=params,
        analyzer=analyzer,
    )


def idf(index: InvertedIndex, term: str) -> float:
    df = index.doc_frequency(term)
    if df == 0:
        return 0.0
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def bm25_search(
    index: InvertedIndex,
    query: str,
    k: int,
    topic_id: str = "q",
    system_tag: str = "bm25",
) -> RankedList:
    """Top-k BM25 ranking for a query; documents scoring exactly 0 are omitted.

    Query tokens are summed as given, so a repeated term contributes once per
    occurrence (query term frequency acts as a multiplier).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k1, b = index.params.k1, index.params.b
    avgdl = index.avg_doc_length
    scores: dict[int, float] = {}
    for token in analyze(query, index.analyzer):
        plist = index.postings.get(token)
        if not plist:
            continue
        term_idf = idf(index, token)
        for ordinal, tf in plist:
            norm = k1 * (1.0 - b + b * index.doc_lengths[ordinal] / avgdl)
            scores[ordinal] = scores.get(ordinal, 0.0) + term_idf * (tf * (k1 + 1.0)) / (tf + norm)
    by_id = {index.ids[ordinal]: s for ordinal, s in scores.items() if s > 0.0}
    return ranked_list_from_scores(topic_id, by_id, system_tag, depth=k)


def save_index(index: InvertedIndex, path: str | Path) -> None:
    payload = {
        "params": {"k1": index.params.k1, "b": index.params.b},
        "analyzer": {
            "fold_alef": index.analyzer.fold_alef,
            "fold_taa_marbuta": index.analyzer.fold_taa_marbuta,
        },
        "ids": index.ids,
        "doc_lengths": index.doc_lengths,
        "postings": {t: index.postings[t] for t in sorted(index.postings)},
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_index(path: str | Path) -> InvertedIndex:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return InvertedIndex(
            postings={
                t: [(int(o), int(tf)) for o, tf in plist]
                for t, plist in payload["postings"].items()
            },
            doc_lengths=[int(n) for n in payload["doc_lengths"]],
            ids=[str(i) for i in payload["ids"]],
            params=Bm25Params(**payload["params"]),
            analyzer=AnalyzerConfig(**payload["analyzer"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"invalid index file: {exc}", path=path) from exc

"""Re-ranking of pooled candidates and top-10 pseudo-judgment selection.

Relevance scorers are external providers (HTTP services or score files); a
scorer failure on any pair fails the whole topic so partial re-rankings can
never leak into the pseudo-judgments.

Score file format: TSV ``topic_id<TAB>passage_id<TAB>score``, one pair per
line, duplicates rejected, scores finite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InputFormatError, ProviderError
from .fusion import CandidatePool, FusionConfig, rrf_fuse
from .runs import RankedList, ranked_list_from_scores

ScoreTable = dict[tuple[str, str], float]

PSEUDO_DEPTH = 10


@dataclass(frozen=True)
class PseudoQrels:
    """Top-ranked candidates per topic, awaiting human validation."""

    entries: tuple[tuple[str, str, int], ...]  # (topic_id, passage_id, pseudo_rank)
    provenance: dict

    def topics(self) -> list[str]:
        return sorted({t for t, _, _ in self.entries})

    def for_topic(self, topic_id: str) -> list[tuple[str, int]]:
        return [(pid, rank) for t, pid, rank in self.entries if t == topic_id]


class FileScorer:
    """Relevance scorer backed by a precomputed (topic, passage) -> score table."""

    def __init__(self, scores: ScoreTable, tag: str):
        self.scores = scores
        self.tag = tag

    @classmethod
    def from_file(cls, path: str | Path, tag: str | None = None) -> "FileScorer":
        return cls(read_scores(path), tag or Path(path).stem)

    def score_pairs(
        self, topic_id: str, query_text: str, passages: Sequence[tuple[str, str]]
    ) -> list[float]:
        out = []
        for pid, _text in passages:
            key = (topic_id, pid)
            if key not in self.scores:
                raise ProviderError(f"no score for pair ({topic_id!r}, {pid!r})")
            out.append(self.scores[key])
        return out


def rerank_pool(
    pool: CandidatePool,
    scorer,
    query_text: str = "",
    texts: Mapping[str, str] | None = None,
) -> RankedList:
    """Re-sort a candidate pool by scorer scores (desc), ties by ascending passage_id."""
    if len(pool) == 0:
        raise ValueError(f"empty candidate pool for topic {pool.topic_id!r}")
    texts = texts or {}
    pairs = [(pid, texts.get(pid, "")) for pid in pool.ranked.passage_ids()]
    scores = scorer.score_pairs(pool.topic_id, query_text, pairs)
    if len(scores) != len(pairs):
        raise ProviderError(
            f"scorer returned {len(scores)} scores for {len(pairs)} passages"
        )
    if any(not math.isfinite(s) for s in scores):
        raise ProviderError(f"non-finite score in topic {pool.topic_id!r}")
    return ranked_list_from_scores(
        pool.topic_id, zip((p for p, _ in pairs), scores), scorer.tag
    )


def select_pseudo_judgments(
    reranked: Sequence[RankedList], cfg: FusionConfig | None = None
) -> PseudoQrels:
    """Fuse scorer rankings for one topic and keep the fused top 10."""
    cfg = cfg or FusionConfig(depth=PSEUDO_DEPTH)
    fused = rrf_fuse(reranked, cfg)
    entries = tuple((fused.topic_id, e.passage_id, e.rank) for e in fused.entries)
    return PseudoQrels(
        entries=entries,
        provenance={
            "scorers": sorted(rl.system_tag for rl in reranked),
            "rrf_k": cfg.rrf_k,
            "depth": cfg.depth,
        },
    )


def build_pseudo_qrels(
    reranked_runs: Sequence[dict[str, RankedList]], cfg: FusionConfig | None = None
) -> PseudoQrels:
    """Apply per-topic selection across whole reranked runs (all scorers, all topics)."""
    cfg = cfg or FusionConfig(depth=PSEUDO_DEPTH)
    topics = sorted({t for run in reranked_runs for t in run})
    entries: list[tuple[str, str, int]] = []
    provenance: dict = {}
    for topic_id in topics:
        lists = [run[topic_id] for run in reranked_runs if topic_id in run]
        selected = select_pseudo_judgments(lists, cfg)
        entries.extend(selected.entries)
        provenance = selected.provenance
    return PseudoQrels(entries=tuple(entries), provenance=provenance)


# ---------------------------------------------------------------------------
# File formats


def read_scores(path: str | Path) -> ScoreTable:
    scores: ScoreTable = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise InputFormatError(
                    "expected 'topic_id<TAB>passage_id<TAB>score'", path=path, line=lineno
                )
            topic_id, pid, score_s = parts
            try:
                score = float(score_s)
            except ValueError as exc:
                raise InputFormatError(f"bad score: {exc}", path=path, line=lineno) from exc
            if not math.isfinite(score):
                raise InputFormatError(
                    f"non-finite score for ({topic_id!r}, {pid!r})", path=path, line=lineno
                )
            key = (topic_id, pid)
            if key in scores:
                raise InputFormatError(
                    f"duplicate pair ({topic_id!r}, {pid!r})", path=path, line=lineno
                )
            scores[key] = score
    return scores


def write_scores(scores: ScoreTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (topic_id, pid), score in sorted(scores.items()):
            fh.write(f"{topic_id}\t{pid}\t{score!r}\n")


def write_pseudo_qrels(pq: PseudoQrels, path: str | Path) -> None:
    payload = {
        "provenance": pq.provenance,
        "entries": [[t, p, r] for t, p, r in pq.entries],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def read_pseudo_qrels(path: str | Path) -> PseudoQrels:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        entries = tuple((str(t), str(p), int(r)) for t, p, r in payload["entries"])
        return PseudoQrels(entries=entries, provenance=dict(payload.get("provenance", {})))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"invalid pseudo-qrels file: {exc}", path=path) from exc

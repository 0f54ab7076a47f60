"""Ranked lists and the TREC run file format.

A run file has one space-separated line per entry:

    topic_id Q0 passage_id rank score system_tag

sorted by topic then rank, scores printed with 6 decimal places. In-memory
lists produced by this toolkit additionally break score ties by ascending
passage_id; files are validated for rank contiguity and score monotonicity
only, because 6-decimal quantization can mask sub-epsilon score differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InputFormatError

Run = dict[str, "RankedList"]  # topic_id -> RankedList, one system per file


@dataclass(frozen=True)
class RunEntry:
    passage_id: str
    rank: int
    score: float


@dataclass(frozen=True)
class RankedList:
    topic_id: str
    entries: tuple[RunEntry, ...]
    system_tag: str

    def __post_init__(self):
        seen = set()
        previous = math.inf
        for i, entry in enumerate(self.entries, start=1):
            if entry.rank != i:
                raise ValueError(
                    f"topic {self.topic_id}: rank {entry.rank} at position {i}; "
                    "ranks must be contiguous from 1"
                )
            if entry.score > previous:
                raise ValueError(
                    f"topic {self.topic_id}: score increases at rank {entry.rank}"
                )
            if entry.passage_id in seen:
                raise ValueError(
                    f"topic {self.topic_id}: duplicate passage {entry.passage_id!r}"
                )
            seen.add(entry.passage_id)
            previous = entry.score

    def passage_ids(self) -> list[str]:
        return [e.passage_id for e in self.entries]

    def truncated(self, depth: int) -> "RankedList":
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        if len(self.entries) <= depth:
            return self
        return RankedList(self.topic_id, self.entries[:depth], self.system_tag)


def ranked_list_from_scores(
    topic_id: str,
    scores: Mapping[str, float] | Iterable[tuple[str, float]],
    system_tag: str,
    depth: int | None = None,
) -> RankedList:
    """Build a RankedList sorted by descending score, ties broken by ascending passage_id."""
    items = scores.items() if isinstance(scores, Mapping) else list(scores)
    ordered = sorted(items, key=lambda kv: (-kv[1], kv[0]))
    if depth is not None:
        ordered = ordered[:depth]
    entries = tuple(
        RunEntry(pid, rank, float(score)) for rank, (pid, score) in enumerate(ordered, start=1)
    )
    return RankedList(topic_id, entries, system_tag)


def read_run(path: str | Path) -> Run:
    """Parse a TREC run file into per-topic ranked lists."""
    per_topic: dict[str, list[tuple[str, int, float, str]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 6 or fields[1] != "Q0":
                raise InputFormatError(
                    "expected 'topic Q0 passage rank score tag'", path=path, line=lineno
                )
            topic_id, _, pid, rank_s, score_s, tag = fields
            try:
                rank = int(rank_s)
                score = float(score_s)
            except ValueError as exc:
                raise InputFormatError(f"bad rank/score: {exc}", path=path, line=lineno) from exc
            if not math.isfinite(score):
                raise InputFormatError("non-finite score", path=path, line=lineno)
            per_topic.setdefault(topic_id, []).append((pid, rank, score, tag))

    run: Run = {}
    for topic_id, rows in per_topic.items():
        rows.sort(key=lambda r: r[1])
        tags = {tag for *_, tag in rows}
        if len(tags) > 1:
            raise InputFormatError(
                f"topic {topic_id} mixes system tags {sorted(tags)}", path=path
            )
        try:
            run[topic_id] = RankedList(
                topic_id,
                tuple(RunEntry(pid, rank, score) for pid, rank, score, _ in rows),
                tags.pop(),
            )
        except ValueError as exc:
            raise InputFormatError(str(exc), path=path) from exc
    return run


def write_run(run: Run | Iterable[RankedList], path: str | Path) -> None:
    """Write ranked lists in TREC format, sorted by (topic_id, rank)."""
    lists = run.values() if isinstance(run, dict) else run
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ranked in sorted(lists, key=lambda r: r.topic_id):
            for e in ranked.entries:
                fh.write(
                    f"{ranked.topic_id} Q0 {e.passage_id} {e.rank} "
                    f"{e.score:.6f} {ranked.system_tag}\n"
                )

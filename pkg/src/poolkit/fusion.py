"""Reciprocal Rank Fusion and candidate-pool construction.

Each document's fused score is sum(1 / (rrf_k + rank)) over the input lists
that rank it; documents beyond a list's depth contribute nothing. The default
constant 60 follows the original RRF formulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .runs import RankedList, ranked_list_from_scores


@dataclass(frozen=True)
class FusionConfig:
    rrf_k: float = 60.0
    depth: int = 1000

    def __post_init__(self):
        if self.rrf_k <= 0:
            raise ValueError(f"rrf_k must be > 0, got {self.rrf_k}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")


@dataclass(frozen=True)
class CandidatePool:
    topic_id: str
    ranked: RankedList
    contributing_systems: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.ranked.entries)


def rrf_fuse(lists: Sequence[RankedList], cfg: FusionConfig = FusionConfig()) -> RankedList:
    """Fuse ranked lists for one topic; output is invariant to input-list order."""
    if not lists:
        raise ValueError("rrf_fuse requires at least one ranked list")
    topic_ids = {rl.topic_id for rl in lists}
    if len(topic_ids) > 1:
        raise ValueError(f"mixed topic_ids in fusion input: {sorted(topic_ids)}")
    topic_id = lists[0].topic_id

    ranks: dict[str, list[int]] = {}
    for rl in lists:
        for entry in rl.entries:
            ranks.setdefault(entry.passage_id, []).append(entry.rank)
    # Summing contributions in sorted rank order keeps float results identical
    # under any permutation of the input lists.
    scores = {
        pid: sum(1.0 / (cfg.rrf_k + r) for r in sorted(rank_list))
        for pid, rank_list in ranks.items()
    }
    tag = "rrf(" + "+".join(sorted(rl.system_tag for rl in lists)) + ")"
    return ranked_list_from_scores(topic_id, scores, tag, depth=cfg.depth)


def build_candidate_pool(
    runs: Sequence[RankedList], cfg: FusionConfig = FusionConfig()
) -> CandidatePool:
    """Truncate each contributing run to cfg.depth, fuse, and record provenance."""
    truncated = [rl.truncated(cfg.depth) for rl in runs]
    fused = rrf_fuse(truncated, cfg)
    return CandidatePool(
        topic_id=fused.topic_id,
        ranked=fused,
        contributing_systems=tuple(rl.system_tag for rl in runs),
    )

"""Synthetic test collections with planted relevance.

Desk-scale stand-in for a full benchmark corpus: passages, topics, and ground
truth are generated with a fixed seed, and retrieval systems are simulated as
noisy observers of the planted relevance. Each simulated system "sees" a
relevant passage with a probability controlled by its quality knob; a shared
per-passage difficulty term correlates the systems, the way real retrievers
tend to miss the same hard documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Passage, word_count, write_passages, write_topics
from .eval import Qrels, write_qrels
from .judge import ScoreTable, write_scores
from .runs import Run, ranked_list_from_scores, write_run


@dataclass(frozen=True)
class SimulationConfig:
    n_passages: int = 1000
    n_topics: int = 50
    relevant_per_topic: int = 3
    n_systems: int = 6
    run_depth: int = 300
    base_quality: float = 0.59       # tuned so single-system recall lands near 0.70
    quality_spread: float = 0.06
    shared_weight: float = 0.7       # how strongly systems miss the same documents
    noise_scale: float = 0.3
    seen_bonus: float = 2.0
    scorer_noise: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.relevant_per_topic > self.n_passages:
            raise ValueError("more relevant passages per topic than passages")
        if not 0.0 <= self.shared_weight <= 1.0:
            raise ValueError(f"shared_weight must be in [0, 1], got {self.shared_weight}")


@dataclass
class SimulatedCollection:
    passages: list[Passage]
    topics: dict[str, str]                    # topic_id -> query text
    qrels: Qrels                              # planted ground truth
    relevant: dict[str, list[str]] = field(default_factory=dict)
    # shared difficulty in [0, 1], drawn once per topic: every system struggles
    # with the same hard topics, the way real retrievers do
    difficulty: dict[tuple[str, str], float] = field(default_factory=dict)


def _pid(i: int, total: int) -> str:
    return f"p{i:0{len(str(total))}d}"


def _tid(i: int, total: int) -> str:
    return f"q{i:0{len(str(total))}d}"


def build_collection(cfg: SimulationConfig) -> SimulatedCollection:
    """Generate passages, topics, and planted binary qrels."""
    rng = np.random.default_rng(cfg.seed)
    pids = [_pid(i, cfg.n_passages) for i in range(1, cfg.n_passages + 1)]
    tids = [_tid(i, cfg.n_topics) for i in range(1, cfg.n_topics + 1)]

    relevant: dict[str, list[str]] = {}
    keywords = {tid: f"kw{tid}" for tid in tids}
    labels: dict[tuple[str, str], int] = {}
    for tid in tids:
        chosen = rng.choice(cfg.n_passages, size=cfg.relevant_per_topic, replace=False)
        relevant[tid] = sorted(pids[int(i)] for i in chosen)
        for pid in relevant[tid]:
            labels[(tid, pid)] = 1

    topic_keywords: dict[str, list[str]] = {pid: [] for pid in pids}
    for tid in tids:
        for pid in relevant[tid]:
            topic_keywords[pid].append(keywords[tid])

    vocabulary = [f"w{i:03d}" for i in range(500)]
    passages = []
    for pid in pids:
        n_filler = int(rng.integers(20, 60))
        words = [vocabulary[int(i)] for i in rng.integers(0, len(vocabulary), n_filler)]
        for kw in topic_keywords[pid]:
            words[: 0] = [kw, kw]
        text = " ".join(words)
        passages.append(Passage(pid, f"sim-{pid}", text, word_count(text), "whole"))

    topics = {tid: f"find passages about {keywords[tid]}" for tid in tids}
    hardness = {tid: float(rng.random()) for tid in tids}
    difficulty = {
        (tid, pid): hardness[tid] for tid in tids for pid in relevant[tid]
    }
    return SimulatedCollection(
        passages=passages, topics=topics, qrels=Qrels(labels),
        relevant=relevant, difficulty=difficulty,
    )


def system_qualities(cfg: SimulationConfig, n_systems: int | None = None) -> list[float]:
    n = n_systems or cfg.n_systems
    if n == 1:
        return [cfg.base_quality]
    offsets = np.linspace(-1.0, 1.0, n)
    return [float(cfg.base_quality + cfg.quality_spread * o) for o in offsets]


def build_runs(
    collection: SimulatedCollection,
    cfg: SimulationConfig,
    qualities: Sequence[float] | None = None,
    tag_prefix: str = "sim",
) -> dict[str, Run]:
    """One simulated run per quality level, each truncated to cfg.run_depth."""
    qualities = list(qualities) if qualities is not None else system_qualities(cfg)
    rng = np.random.default_rng(cfg.seed + 1)
    pids = [p.passage_id for p in collection.passages]
    runs: dict[str, Run] = {}
    for sys_idx, quality in enumerate(qualities, start=1):
        tag = f"{tag_prefix}{sys_idx:02d}"
        run: Run = {}
        for tid in collection.topics:
            noise = rng.normal(0.0, cfg.noise_scale, size=len(pids))
            scores = dict(zip(pids, noise.tolist()))
            for pid in collection.relevant[tid]:
                shared = collection.difficulty[(tid, pid)]
                mixed = cfg.shared_weight * shared + (1.0 - cfg.shared_weight) * float(rng.random())
                if mixed < quality:
                    scores[pid] += cfg.seen_bonus
            run[tid] = ranked_list_from_scores(tid, scores, tag, depth=cfg.run_depth)
        runs[tag] = run
    return runs


def build_scorer_table(
    collection: SimulatedCollection,
    pairs: Sequence[tuple[str, str]],
    cfg: SimulationConfig,
    seed_offset: int = 0,
) -> ScoreTable:
    """Relevance scores for (topic, passage) pairs: planted label plus Gaussian noise."""
    rng = np.random.default_rng(cfg.seed + 100 + seed_offset)
    table: ScoreTable = {}
    for tid, pid in pairs:
        label = 1.0 if (tid, pid) in collection.qrels.labels else 0.0
        table[(tid, pid)] = label + float(rng.normal(0.0, cfg.scorer_noise))
    return table


def all_run_pairs(runs: dict[str, Run]) -> list[tuple[str, str]]:
    """Every (topic, passage) pair appearing in any run; superset of any fused pool."""
    pairs = {
        (tid, entry.passage_id)
        for run in runs.values()
        for tid, ranked in run.items()
        for entry in ranked.entries
    }
    return sorted(pairs)


def write_collection(
    collection: SimulatedCollection,
    runs: dict[str, Run],
    scorer_tables: Sequence[ScoreTable],
    out_dir: str | Path,
) -> None:
    """Emit the full simulated collection in the pipeline's file formats."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_passages(collection.passages, out / "passages.jsonl")
    write_topics(collection.topics, out / "topics.jsonl")
    write_qrels(collection.qrels, out / "qrels.txt")
    runs_dir = out / "runs"
    runs_dir.mkdir(exist_ok=True)
    for tag, run in runs.items():
        write_run(run, runs_dir / f"{tag}.run")
    scores_dir = out / "scores"
    scores_dir.mkdir(exist_ok=True)
    for i, table in enumerate(scorer_tables, start=1):
        write_scores(table, scores_dir / f"scorer{i}.tsv")

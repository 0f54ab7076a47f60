import pytest

from poolkit.corpus import read_passages, read_topics
from poolkit.eval import hit_at_k, read_qrels, recall_at_k
from poolkit.fusion import FusionConfig, build_candidate_pool
from poolkit.judge import FileScorer, build_pseudo_qrels, read_scores, rerank_pool
from poolkit.runs import ranked_list_from_scores, read_run
from poolkit.simulate import (
    SimulationConfig,
    all_run_pairs,
    build_collection,
    build_runs,
    build_scorer_table,
    system_qualities,
    write_collection,
)


def small_cfg(seed=0, **kw):
    defaults = dict(n_passages=200, n_topics=10, n_systems=4, run_depth=60, seed=seed)
    defaults.update(kw)
    return SimulationConfig(**defaults)


def pool_and_pseudo(collection, runs, cfg, n_scorers=3):
    fuse_cfg = FusionConfig(rrf_k=60.0, depth=1000)
    pools = {
        tid: build_candidate_pool([runs[tag][tid] for tag in sorted(runs)], fuse_cfg)
        for tid in collection.topics
    }
    pool_run = {tid: p.ranked for tid, p in pools.items()}
    pairs = [(t, e.passage_id) for t, rl in pool_run.items() for e in rl.entries]
    reranked = []
    for i in range(n_scorers):
        scorer = FileScorer(build_scorer_table(collection, pairs, cfg, seed_offset=i), f"ce{i}")
        reranked.append({t: rerank_pool(pools[t], scorer) for t in pool_run})
    pq = build_pseudo_qrels(reranked)
    pseudo_run = {
        t: ranked_list_from_scores(
            t, {pid: 1.0 / r for tt, pid, r in pq.entries if tt == t}, "pseudo"
        )
        for t in collection.topics
    }
    return pool_run, pq, pseudo_run


def test_collection_shape_and_determinism():
    cfg = small_cfg()
    a = build_collection(cfg)
    b = build_collection(cfg)
    assert [p.text for p in a.passages] == [p.text for p in b.passages]
    assert a.topics == b.topics
    assert a.qrels.labels == b.qrels.labels
    assert len(a.passages) == 200
    assert len(a.topics) == 10
    assert all(len(a.relevant[t]) == cfg.relevant_per_topic for t in a.topics)


def test_runs_deterministic_and_depth_bounded():
    cfg = small_cfg()
    col = build_collection(cfg)
    first = build_runs(col, cfg)
    second = build_runs(col, cfg)
    assert first == second
    for run in first.values():
        for ranked in run.values():
            assert len(ranked.entries) <= cfg.run_depth


def test_quality_orders_recall():
    cfg = small_cfg(n_topics=20)
    col = build_collection(cfg)
    runs = build_runs(col, cfg, qualities=[0.2, 0.9], tag_prefix="q")
    weak = recall_at_k({t: runs["q01"][t] for t in col.topics}, col.qrels, 1000)
    strong = recall_at_k({t: runs["q02"][t] for t in col.topics}, col.qrels, 1000)
    assert strong > weak


def test_default_tuning_hits_seventy_percent_recall():
    cfg = SimulationConfig(seed=0)
    col = build_collection(cfg)
    runs = build_runs(col, cfg)
    singles = [recall_at_k(run, col.qrels, 1000) for run in runs.values()]
    assert sum(singles) / len(singles) == pytest.approx(0.70, abs=0.05)


def test_system_qualities_spread():
    cfg = SimulationConfig()
    qualities = system_qualities(cfg)
    assert len(qualities) == cfg.n_systems
    assert max(qualities) - min(qualities) == pytest.approx(2 * cfg.quality_spread)


def test_reranker_improves_hit_on_most_seeds():
    # pseudo-judgment top-10 should beat the raw pool top-10 on >= 90% of trials
    wins = 0
    trials = 20
    for seed in range(trials):
        cfg = small_cfg(seed=seed)
        col = build_collection(cfg)
        runs = build_runs(col, cfg)
        pool_run, _, pseudo_run = pool_and_pseudo(col, runs, cfg)
        if hit_at_k(pseudo_run, col.qrels, 10) >= hit_at_k(pool_run, col.qrels, 10):
            wins += 1
    assert wins >= 0.9 * trials


def test_write_collection_files_parse_back(tmp_path):
    cfg = small_cfg()
    col = build_collection(cfg)
    runs = build_runs(col, cfg)
    tables = [build_scorer_table(col, all_run_pairs(runs), cfg, seed_offset=i) for i in range(2)]
    write_collection(col, runs, tables, tmp_path)

    assert len(read_passages(tmp_path / "passages.jsonl")) == 200
    assert read_topics(tmp_path / "topics.jsonl") == col.topics
    assert read_qrels(tmp_path / "qrels.txt").labels == col.qrels.labels
    for tag, run in runs.items():
        loaded = read_run(tmp_path / "runs" / f"{tag}.run")
        assert set(loaded) == set(run)
        for tid in run:  # scores survive at the file format's 6-decimal precision
            assert [(e.passage_id, e.rank) for e in loaded[tid].entries] == [
                (e.passage_id, e.rank) for e in run[tid].entries
            ]
            for got, want in zip(loaded[tid].entries, run[tid].entries):
                assert got.score == round(want.score, 6)
    assert read_scores(tmp_path / "scores" / "scorer1.tsv") == tables[0]

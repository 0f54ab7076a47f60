import itertools
import math
import random

import pytest

from poolkit.errors import InputFormatError, ProviderError
from poolkit.fusion import CandidatePool
from poolkit.judge import (
    FileScorer,
    PseudoQrels,
    build_pseudo_qrels,
    read_pseudo_qrels,
    read_scores,
    rerank_pool,
    select_pseudo_judgments,
    write_pseudo_qrels,
    write_scores,
)
from poolkit.runs import ranked_list_from_scores


class FnScorer:
    def __init__(self, fn, tag):
        self.fn = fn
        self.tag = tag

    def score_pairs(self, topic_id, query_text, passages):
        return [self.fn(topic_id, pid) for pid, _ in passages]


def pool_of(topic_id, ids, tag="pool"):
    ranked = ranked_list_from_scores(
        topic_id, {pid: float(len(ids) - i) for i, pid in enumerate(ids)}, tag
    )
    return CandidatePool(topic_id, ranked, (tag,))


def test_constant_scorer_sorts_by_passage_id():
    pool = pool_of("q1", ["m", "z", "a", "k"])
    ranked = rerank_pool(pool, FnScorer(lambda t, p: 1.0, "const"))
    assert ranked.passage_ids() == ["a", "k", "m", "z"]


def test_negative_rank_scorer_preserves_pool_order():
    ids = [f"d{i}" for i in range(20)]
    pool = pool_of("q1", ids)
    position = {pid: i for i, pid in enumerate(ids)}
    ranked = rerank_pool(pool, FnScorer(lambda t, p: -position[p], "negrank"))
    assert ranked.passage_ids() == ids


def test_random_scorer_matches_argsort_oracle():
    rng = random.Random(31)
    ids = [f"d{i:03d}" for i in range(100)]
    pool = pool_of("q1", ids)
    scores = {pid: rng.random() for pid in ids}
    ranked = rerank_pool(pool, FnScorer(lambda t, p: scores[p], "rand"))
    expected = [pid for pid, _ in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))]
    assert ranked.passage_ids() == expected


def test_rerank_rejects_empty_pool():
    pool = CandidatePool("q1", ranked_list_from_scores("q1", {}, "pool"), ("pool",))
    with pytest.raises(ValueError, match="empty"):
        rerank_pool(pool, FnScorer(lambda t, p: 1.0, "s"))


def test_missing_pair_fails_whole_topic():
    pool = pool_of("q1", ["a", "b"])
    scorer = FileScorer({("q1", "a"): 1.0}, "partial")
    with pytest.raises(ProviderError, match="b"):
        rerank_pool(pool, scorer)


def test_single_scorer_top10():
    ids = [f"d{i:02d}" for i in range(25)]
    pool = pool_of("q1", ids)
    position = {pid: i for i, pid in enumerate(ids)}
    ranked = rerank_pool(pool, FnScorer(lambda t, p: -position[p], "s1"))
    pq = select_pseudo_judgments([ranked])
    assert [pid for _, pid, _ in pq.entries] == ids[:10]
    assert [r for _, _, r in pq.entries] == list(range(1, 11))


def test_agreeing_scorers_keep_the_set():
    # 3 scorers agree on the same top 10 of 12 in different orders
    ids = [f"d{i:02d}" for i in range(12)]
    top = ids[:10]
    pool = pool_of("q1", ids)
    orders = [top, top[::-1], top[5:] + top[:5]]
    lists = []
    for j, order in enumerate(orders):
        scores = {pid: float(10 - order.index(pid)) if pid in order else -5.0 for pid in ids}
        lists.append(rerank_pool(pool, FnScorer(lambda t, p, s=scores: s[p], f"s{j}")))
    pq = select_pseudo_judgments(lists)
    assert {pid for _, pid, _ in pq.entries} == set(top)


def test_small_pool_yields_min_rule():
    pool = pool_of("q1", ["a", "b", "c", "d"])
    ranked = rerank_pool(pool, FnScorer(lambda t, p: 1.0, "s"))
    pq = select_pseudo_judgments([ranked])
    assert len(pq.entries) == 4


def test_scorer_order_invariance():
    rng = random.Random(12)
    ids = [f"d{i:02d}" for i in range(30)]
    pool = pool_of("q1", ids)
    lists = []
    for j in range(3):
        scores = {pid: rng.random() for pid in ids}
        lists.append(rerank_pool(pool, FnScorer(lambda t, p, s=scores: s[p], f"s{j}")))
    baseline = select_pseudo_judgments(lists)
    for perm in itertools.permutations(lists):
        assert select_pseudo_judgments(list(perm)) == baseline


def test_containment_in_pool():
    rng = random.Random(4)
    ids = [f"d{i:03d}" for i in range(50)]
    pool = pool_of("q1", ids)
    lists = [
        rerank_pool(pool, FnScorer(lambda t, p, j=j: rng.random(), f"s{j}")) for j in range(3)
    ]
    pq = select_pseudo_judgments(lists)
    pooled = set(pool.ranked.passage_ids())
    assert all(pid in pooled for _, pid, _ in pq.entries)


def test_build_pseudo_qrels_over_topics():
    runs = []
    for j in range(2):
        run = {}
        for t in ("q1", "q2"):
            ids = [f"{t}d{i}" for i in range(15)]
            pool = pool_of(t, ids)
            run[t] = rerank_pool(pool, FnScorer(lambda _t, p: hash(p) % 97, f"s{j}"))
        runs.append(run)
    pq = build_pseudo_qrels(runs)
    assert pq.topics() == ["q1", "q2"]
    assert len(pq.for_topic("q1")) == 10
    assert pq.provenance["scorers"] == ["s0", "s1"]
    assert pq.provenance["depth"] == 10


# ---------------------------------------------------------------------------
# Score files


def test_score_file_parse(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("q1\td7\t3.25\n", encoding="utf-8")
    assert read_scores(path) == {("q1", "d7"): 3.25}


def test_score_file_duplicate_rejected(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("q1\td7\t3.25\nq1\td7\t1.0\n", encoding="utf-8")
    with pytest.raises(InputFormatError, match="duplicate"):
        read_scores(path)


def test_score_file_nonfinite_rejected(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("q1\td7\tnan\n", encoding="utf-8")
    with pytest.raises(InputFormatError, match="non-finite"):
        read_scores(path)


def test_score_file_round_trip(tmp_path):
    rng = random.Random(77)
    scores = {
        (f"q{rng.randint(0, 5)}", f"d{i}"): rng.uniform(-4, 4) * math.pi for i in range(200)
    }
    path = tmp_path / "s.tsv"
    write_scores(scores, path)
    assert read_scores(path) == scores


def test_pseudo_qrels_file_round_trip(tmp_path):
    pq = PseudoQrels(
        entries=(("q1", "d1", 1), ("q1", "d2", 2), ("q2", "d9", 1)),
        provenance={"scorers": ["s0"], "rrf_k": 60.0, "depth": 10},
    )
    path = tmp_path / "pq.json"
    write_pseudo_qrels(pq, path)
    assert read_pseudo_qrels(path) == pq

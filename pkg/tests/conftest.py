import random

import pytest

from poolkit.eval import Qrels
from poolkit.runs import RankedList, RunEntry


def run_from_rankings(rankings: dict[str, list[str]], tag: str = "sys") -> dict[str, RankedList]:
    """Turn plain per-topic id lists into RankedLists with descending synthetic scores."""
    run = {}
    for topic_id, ids in rankings.items():
        entries = tuple(
            RunEntry(pid, rank, float(len(ids) - rank + 1)) for rank, pid in enumerate(ids, 1)
        )
        run[topic_id] = RankedList(topic_id, entries, tag)
    return run


def qrels_from_labels(labels: dict[tuple[str, str], int]) -> Qrels:
    return Qrels(dict(labels))


@pytest.fixture
def rng():
    return random.Random(20240811)

"""Retrieval metrics, effort-reduction curves, and system-ranking correlation.

Conventions follow the standard evaluator behavior: unjudged documents count
as non-relevant, and topics with no judged-relevant document are excluded
from metric means (but counted). Kendall's tau is the tie-corrected tau-b.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputFormatError
from .runs import Run

log = logging.getLogger(__name__)

DEFAULT_EFFORT_KS = (10, 30, 50, 100, 1000)
POOL_DEPTH = 1000


class Qrels:
    """Binary relevance judgments keyed by (topic_id, passage_id)."""

    def __init__(self, labels: dict[tuple[str, str], int] | None = None):
        self.labels: dict[tuple[str, str], int] = {}
        self._relevant: dict[str, set[str]] = {}
        for (topic_id, pid), label in (labels or {}).items():
            self.add(topic_id, pid, label)

    def add(self, topic_id: str, pid: str, label: int) -> None:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        key = (topic_id, pid)
        if key in self.labels:
            raise ValueError(f"duplicate qrels pair {key!r}")
        self.labels[key] = label
        if label == 1:
            self._relevant.setdefault(topic_id, set()).add(pid)

    def topics(self) -> list[str]:
        return sorted({t for t, _ in self.labels})

    def relevant_of(self, topic_id: str) -> frozenset[str]:
        return frozenset(self._relevant.get(topic_id, ()))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self.labels


def read_qrels(path: str | Path) -> Qrels:
    """Parse TREC qrels lines: ``topic_id 0 passage_id label``."""
    qrels = Qrels()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 4:
                raise InputFormatError(
                    "expected 'topic_id 0 passage_id label'", path=path, line=lineno
                )
            topic_id, _, pid, label_s = fields
            try:
                qrels.add(topic_id, pid, int(label_s))
            except ValueError as exc:
                raise InputFormatError(str(exc), path=path, line=lineno) from exc
    return qrels


def write_qrels(qrels: Qrels, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (topic_id, pid), label in sorted(qrels.labels.items()):
            fh.write(f"{topic_id} 0 {pid} {label}\n")


# ---------------------------------------------------------------------------
# Per-topic metric kernels


def _hit(top: Sequence[str], relevant: frozenset[str]) -> float:
    return 1.0 if any(pid in relevant for pid in top) else 0.0


def _mrr(top: Sequence[str], relevant: frozenset[str]) -> float:
    for rank, pid in enumerate(top, start=1):
        if pid in relevant:
            return 1.0 / rank
    return 0.0


def _recall(top: Sequence[str], relevant: frozenset[str]) -> float:
    return len(relevant.intersection(top)) / len(relevant)


def _ndcg_at(top: Sequence[str], relevant: frozenset[str], k: int) -> float:
    # Binary gains, log2 discount; the ideal ranking fills min(k, #relevant)
    # slots with relevant documents regardless of how many the run returned.
    dcg = sum(
        1.0 / math.log2(rank + 1) for rank, pid in enumerate(top, start=1) if pid in relevant
    )
    ideal = sum(1.0 / math.log2(rank + 1) for rank in range(1, min(len(relevant), k) + 1))
    return dcg / ideal if ideal > 0 else 0.0


def per_topic_metric(run: Run, qrels: Qrels, name: str, k: int) -> dict[str, float]:
    """Metric value per topic, over qrels topics that have >= 1 relevant document.

    Topics present in the run but absent from the qrels are skipped with a
    warning; qrels topics missing from the run score 0.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    extra = sorted(set(run) - set(qrels.topics()))
    if extra:
        log.warning("%d run topics absent from qrels (e.g. %s); excluded", len(extra), extra[0])
    values: dict[str, float] = {}
    for topic_id in qrels.topics():
        relevant = qrels.relevant_of(topic_id)
        if not relevant:
            continue
        ranked = run.get(topic_id)
        top = ranked.passage_ids()[:k] if ranked else []
        if name == "ndcg":
            values[topic_id] = _ndcg_at(top, relevant, k)
        else:
            values[topic_id] = {"hit": _hit, "mrr": _mrr, "recall": _recall}[name](top, relevant)
    return values


def _aggregate(values: dict[str, float]) -> float:
    return sum(values.values()) / len(values) if values else 0.0


def hit_at_k(run: Run, qrels: Qrels, k: int) -> float:
    return _aggregate(per_topic_metric(run, qrels, "hit", k))


def mrr_at_k(run: Run, qrels: Qrels, k: int) -> float:
    return _aggregate(per_topic_metric(run, qrels, "mrr", k))


def recall_at_k(run: Run, qrels: Qrels, k: int) -> float:
    return _aggregate(per_topic_metric(run, qrels, "recall", k))


def ndcg_at_k(run: Run, qrels: Qrels, k: int) -> float:
    return _aggregate(per_topic_metric(run, qrels, "ndcg", k))


METRIC_NAMES = ("hit", "mrr", "recall", "ndcg")


def parse_metric(spec: str) -> tuple[str, int]:
    """Parse 'mrr@10' into ('mrr', 10)."""
    try:
        name, k_s = spec.split("@")
        k = int(k_s)
    except ValueError as exc:
        raise ValueError(f"metric must look like 'mrr@10', got {spec!r}") from exc
    if name not in METRIC_NAMES or k < 1:
        raise ValueError(f"unknown metric {spec!r}")
    return name, k


def metric_value(run: Run, qrels: Qrels, spec: str) -> float:
    name, k = parse_metric(spec)
    return _aggregate(per_topic_metric(run, qrels, name, k))


@dataclass(frozen=True)
class MetricReport:
    system_tag: str
    values: dict[str, float]                 # metric spec -> aggregate
    per_topic: dict[str, dict[str, float]]   # metric spec -> topic -> value
    topics_evaluated: int
    topics_zero_relevant: int


def evaluate_run(run: Run, qrels: Qrels, ks: Sequence[int] = (10,)) -> MetricReport:
    """All metrics at each cutoff, with per-topic breakdown."""
    tags = {rl.system_tag for rl in run.values()}
    values: dict[str, float] = {}
    per_topic: dict[str, dict[str, float]] = {}
    for k in ks:
        for name in METRIC_NAMES:
            spec = f"{name}@{k}"
            topic_values = per_topic_metric(run, qrels, name, k)
            per_topic[spec] = topic_values
            values[spec] = _aggregate(topic_values)
    evaluated = {t for t in qrels.topics() if qrels.relevant_of(t)}
    return MetricReport(
        system_tag=tags.pop() if len(tags) == 1 else ",".join(sorted(tags)),
        values=values,
        per_topic=per_topic,
        topics_evaluated=len(evaluated),
        topics_zero_relevant=len(qrels.topics()) - len(evaluated),
    )


# ---------------------------------------------------------------------------
# Effort-reduction analysis


@dataclass(frozen=True)
class EffortCurve:
    points: tuple[tuple[int, float, float], ...]  # (k, effort_reduction, hit@k)


def effort_reduction(k: int, pool_depth: int = POOL_DEPTH) -> float:
    """Fraction of annotation saved by judging only top-k of a depth-N pool."""
    return (pool_depth - k) / pool_depth


def effort_curve(
    run: Run,
    qrels: Qrels,
    ks: Sequence[int] = DEFAULT_EFFORT_KS,
    pool_depth: int = POOL_DEPTH,
) -> EffortCurve:
    points = tuple(
        (k, effort_reduction(k, pool_depth), hit_at_k(run, qrels, k)) for k in sorted(ks)
    )
    return EffortCurve(points=points)


def write_effort_csv(curve: EffortCurve, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,effort,hit\n")
        for k, effort, hit in curve.points:
            fh.write(f"{k},{effort:.6f},{hit:.6f}\n")


# ---------------------------------------------------------------------------
# Rank correlation


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Kendall's tau-b via explicit pairwise counting."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError("kendall_tau needs at least 2 observations")
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            prod = (x[i] - x[j]) * (y[i] - y[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(x)
    n2 = _tie_pairs(y)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0:
        return math.nan
    return _clamp_correlation((concordant - discordant) / denom)


def _tie_pairs(values: Sequence[float]) -> int:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _average_ranks(values: Sequence[float]) -> list[float]:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j < n and values[order[j]] == values[order[i]]:
            j += 1
        avg = (i + 1 + j) / 2.0
        for idx in order[i:j]:
            ranks[idx] = avg
        i = j
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman correlation: rank-difference formula when tie-free, else Pearson on average ranks."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError("spearman_rho needs at least 2 observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    if _tie_pairs(x) == 0 and _tie_pairs(y) == 0:
        d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
        return 1.0 - 6.0 * d2 / (n * (n * n - 1))
    mean_x = sum(rx) / n
    mean_y = sum(ry) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    denom = math.sqrt(var_x) * math.sqrt(var_y)
    if denom == 0:
        return math.nan
    return _clamp_correlation(cov / denom)


def _clamp_correlation(value: float) -> float:
    # float rounding can push |r| a few ulps past 1; the contract is [-1, 1]
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class CorrelationReport:
    metric: str
    kendall: float
    spearman: float
    systems: tuple[str, ...]
    pairs: tuple[tuple[str, float, float], ...]  # (system_tag, value_a, value_b)


def system_ranking_correlation(
    runs: dict[str, Run], qrels_a: Qrels, qrels_b: Qrels, metric: str = "mrr@10"
) -> CorrelationReport:
    """Evaluate every system under both qrels and correlate the two value vectors."""
    if len(runs) < 3:
        raise ValueError(f"need >= 3 systems for ranking correlation, got {len(runs)}")
    tags = sorted(runs)
    values_a = [metric_value(runs[t], qrels_a, metric) for t in tags]
    values_b = [metric_value(runs[t], qrels_b, metric) for t in tags]
    return CorrelationReport(
        metric=metric,
        kendall=kendall_tau(values_a, values_b),
        spearman=spearman_rho(values_a, values_b),
        systems=tuple(tags),
        pairs=tuple(zip(tags, values_a, values_b)),
    )


def generalization_ratio(zero_shot: float, in_domain: float) -> float:
    """Zero-shot performance divided by in-domain performance."""
    if in_domain == 0:
        raise ValueError("generalization ratio undefined for in_domain = 0")
    return zero_shot / in_domain


# ---------------------------------------------------------------------------
# Report serialization


def metric_report_lines(report: MetricReport) -> list[str]:
    width = max(len(s) for s in report.values)
    lines = [f"system: {report.system_tag}"]
    lines += [f"  {spec.ljust(width)}  {value:.4f}" for spec, value in sorted(report.values.items())]
    lines.append(
        f"  topics evaluated: {report.topics_evaluated}"
        f" (zero-relevant excluded: {report.topics_zero_relevant})"
    )
    return lines


def write_metric_report_jsonl(report: MetricReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for spec in sorted(report.values):
            record = {
                "system_tag": report.system_tag,
                "metric": spec,
                "value": report.values[spec],
                "topics_evaluated": report.topics_evaluated,
                "topics_zero_relevant": report.topics_zero_relevant,
                "per_topic": dict(sorted(report.per_topic[spec].items())),
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def write_correlation_jsonl(reports: Iterable[CorrelationReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in reports:
            record = {
                "metric": r.metric,
                "kendall_tau": r.kendall,
                "spearman_rho": r.spearman,
                "systems": len(r.systems),
                "pairs": [[tag, a, b] for tag, a, b in r.pairs],
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def write_correlation_csv(report: CorrelationReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("system,value_a,value_b\n")
        for tag, a, b in report.pairs:
            fh.write(f"{tag},{a:.6f},{b:.6f}\n")

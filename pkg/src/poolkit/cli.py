"""Command-line pipeline: one subcommand per stage, file formats in, file formats out.

Every subcommand is deterministic given its inputs (and a fixed seed where
randomness is involved), so re-running with unchanged inputs produces
byte-identical outputs. Failures exit non-zero with a single machine-parseable
line: ``error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .annotate import AnnotationService
from .bm25 import Bm25Params, bm25_search, build_inverted_index, load_index, save_index
from .corpus import (
    ChunkConfig,
    chunk_corpus,
    corpus_stats,
    ingest_corpus,
    read_passages,
    read_topics,
    write_passages,
)
from .dense import dense_search, embed_corpus, embed_query, read_vectors, write_vectors
from .errors import PoolkitError
from .eval import (
    DEFAULT_EFFORT_KS,
    effort_curve,
    evaluate_run,
    metric_report_lines,
    read_qrels,
    system_ranking_correlation,
    write_correlation_csv,
    write_correlation_jsonl,
    write_effort_csv,
    write_metric_report_jsonl,
)
from .fusion import CandidatePool, FusionConfig, build_candidate_pool, rrf_fuse
from .judge import (
    FileScorer,
    build_pseudo_qrels,
    read_pseudo_qrels,
    rerank_pool,
    write_pseudo_qrels,
)
from .providers import HashingEmbedder, HttpEmbedder, HttpScorer
from .runs import read_run, write_run
from .simulate import (
    SimulationConfig,
    all_run_pairs,
    build_collection,
    build_runs,
    build_scorer_table,
    write_collection,
)


def load_config(path: str | Path) -> dict:
    """Flat `key = value` config file; values parsed as int/float/bool/str."""
    config: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line must be 'key = value': {line!r}")
            key, _, raw = line.partition("=")
            config[key.strip().replace("-", "_")] = _parse_value(raw.strip())
    return config


def _parse_value(raw: str):
    if raw.startswith(('"', "'")) and raw.endswith(raw[0]) and len(raw) >= 2:
        return raw[1:-1]
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def _get(args: argparse.Namespace, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return args.config_values.get(key, default)


def _embedder(args: argparse.Namespace, dimension: int | None = None):
    url = _get(args, "provider_url", None)
    if url:
        return HttpEmbedder(url)
    return HashingEmbedder(dimension or int(_get(args, "embed_dim", 64)))


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_chunk(args) -> int:
    markers = _get(args, "markers", None)
    cfg = ChunkConfig(
        marker_patterns=tuple(markers.split(",")) if markers else ChunkConfig().marker_patterns,
        max_words=int(_get(args, "max_words", 450)),
        min_words=int(_get(args, "min_words", 20)),
    )
    docs = ingest_corpus(args.corpus, format=args.format)
    passages = chunk_corpus(docs, _embedder(args), cfg)
    write_passages(passages, args.out)
    stats = corpus_stats(passages)
    print(
        f"chunked {len(docs)} documents into {stats.passage_count} passages "
        f"(words: {stats.word_mean:.2f} +/- {stats.word_std:.2f}, "
        f"range {stats.word_min}-{stats.word_max})"
    )
    return 0


def cmd_index(args) -> int:
    passages = read_passages(args.passages)
    params = Bm25Params(k1=float(_get(args, "k1", 0.9)), b=float(_get(args, "b", 0.4)))
    index = build_inverted_index(passages, params)
    save_index(index, args.out)
    print(f"indexed {index.doc_count} passages, {len(index.postings)} terms")
    return 0


def cmd_search_bm25(args) -> int:
    index = load_index(args.index)
    topics = read_topics(args.topics)
    topk = int(_get(args, "topk", 1000))
    run = {
        tid: bm25_search(index, text, topk, topic_id=tid, system_tag=args.tag)
        for tid, text in topics.items()
    }
    write_run(run, args.out)
    print(f"searched {len(topics)} topics -> {args.out}")
    return 0


def cmd_embed(args) -> int:
    passages = read_passages(args.passages)
    store = embed_corpus(_embedder(args), passages)
    write_vectors(store, args.vectors)
    print(f"embedded {len(store)} passages at dim={store.dimension} -> {args.vectors}")
    return 0


def cmd_search_dense(args) -> int:
    store = read_vectors(args.vectors)
    topics = read_topics(args.topics)
    provider = _embedder(args, dimension=store.dimension)
    topk = int(_get(args, "topk", 1000))
    run = {
        tid: dense_search(store, embed_query(provider, text), topk, topic_id=tid, system_tag=args.tag)
        for tid, text in topics.items()
    }
    write_run(run, args.out)
    print(f"searched {len(topics)} topics -> {args.out}")
    return 0


def _fusion_config(args, default_depth: int = 1000) -> FusionConfig:
    return FusionConfig(
        rrf_k=float(_get(args, "rrf_k", 60.0)), depth=int(_get(args, "depth", default_depth))
    )


def cmd_fuse(args) -> int:
    runs = [read_run(p) for p in args.runs]
    cfg = _fusion_config(args)
    topics = sorted({tid for run in runs for tid in run})
    fused = {
        tid: rrf_fuse([run[tid] for run in runs if tid in run], cfg) for tid in topics
    }
    write_run(fused, args.out)
    print(f"fused {len(args.runs)} runs over {len(topics)} topics -> {args.out}")
    return 0


def cmd_pool(args) -> int:
    runs = [read_run(p) for p in args.runs]
    cfg = _fusion_config(args)
    topics = sorted({tid for run in runs for tid in run})
    pooled = {
        tid: build_candidate_pool([run[tid] for run in runs if tid in run], cfg).ranked
        for tid in topics
    }
    write_run(pooled, args.out)
    print(f"pooled {len(args.runs)} runs over {len(topics)} topics (depth {cfg.depth}) -> {args.out}")
    return 0


def _load_scorer(args):
    scores = _get(args, "scores", None)
    url = _get(args, "provider_url", None)
    if scores:
        return FileScorer.from_file(scores, tag=args.tag)
    if url:
        return HttpScorer(url, tag=args.tag or "cross-encoder")
    raise ValueError("provide --scores or --provider-url for the relevance scorer")


def cmd_rerank(args) -> int:
    pool_run = read_run(args.pool)
    scorer = _load_scorer(args)
    texts = {p.passage_id: p.text for p in read_passages(args.passages)} if args.passages else {}
    topics = read_topics(args.topics) if args.topics else {}
    reranked = {}
    for tid, ranked in pool_run.items():
        pool = CandidatePool(tid, ranked, (ranked.system_tag,))
        reranked[tid] = rerank_pool(pool, scorer, query_text=topics.get(tid, ""), texts=texts)
    write_run(reranked, args.out)
    print(f"reranked {len(reranked)} topics with {scorer.tag} -> {args.out}")
    return 0


def cmd_pseudo_qrels(args) -> int:
    pool_run = read_run(args.pool)
    cfg = _fusion_config(args, default_depth=10)
    reranked_runs = []
    for path in args.scores:
        scorer = FileScorer.from_file(path)
        run = {}
        for tid, ranked in pool_run.items():
            pool = CandidatePool(tid, ranked, (ranked.system_tag,))
            run[tid] = rerank_pool(pool, scorer)
        reranked_runs.append(run)
    pq = build_pseudo_qrels(reranked_runs, cfg)
    write_pseudo_qrels(pq, args.out)
    print(
        f"selected {len(pq.entries)} pseudo-judgments over {len(pq.topics())} topics "
        f"({len(args.scores)} scorers) -> {args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .webapp import create_app

    service = AnnotationService(
        log_path=args.log, lease_seconds=float(_get(args, "lease_seconds", 900.0))
    )
    if args.topics:
        n = service.import_topics(read_topics(args.topics))
        print(f"imported {n} topics")
    if args.pseudo_qrels:
        n = service.load_pseudo_qrels(read_pseudo_qrels(args.pseudo_qrels))
        print(f"loaded {n} new judgment tasks")
    texts = (
        {p.passage_id: p.text for p in read_passages(args.passages)} if args.passages else {}
    )
    uvicorn.run(create_app(service, texts), host=args.host, port=args.port)
    return 0


def cmd_export_qrels(args) -> int:
    service = AnnotationService(log_path=args.log)
    content = service.export_qrels(multi_assessor=args.multi_assessor)
    Path(args.out).write_text(content, encoding="utf-8")
    print(f"exported {len(content.splitlines())} qrels lines -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    report = evaluate_run(run, qrels, ks=args.k)
    for line in metric_report_lines(report):
        print(line)
    if args.out:
        write_metric_report_jsonl(report, args.out)
    return 0


def cmd_effort_curve(args) -> int:
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    curve = effort_curve(run, qrels, ks=args.ks, pool_depth=int(_get(args, "depth", 1000)))
    write_effort_csv(curve, args.out)
    for k, effort, hit in curve.points:
        print(f"k={k:<5d} effort_reduction={effort:.3f} hit@k={hit:.4f}")
    if not args.no_figure:
        from .plotting import save_effort_curve_figure

        figure = args.figure or str(Path(args.out).with_suffix(".png"))
        save_effort_curve_figure(curve, figure)
        print(f"figure -> {figure}")
    return 0


def cmd_correlate(args) -> int:
    runs = {}
    for path in args.runs:
        run = read_run(path)
        tags = {rl.system_tag for rl in run.values()}
        tag = tags.pop() if len(tags) == 1 else Path(path).stem
        if tag in runs:
            raise ValueError(f"duplicate system tag {tag!r} among input runs")
        runs[tag] = run
    qrels_a = read_qrels(args.qrels_a)
    qrels_b = read_qrels(args.qrels_b)
    reports = [
        system_ranking_correlation(runs, qrels_a, qrels_b, metric) for metric in args.metric
    ]
    for report in reports:
        print(
            f"{report.metric}: kendall_tau={report.kendall:.4f} "
            f"spearman_rho={report.spearman:.4f} over {len(report.systems)} systems"
        )
    out = Path(args.out)
    write_correlation_jsonl(reports, out)
    for report in reports:
        suffix = report.metric.replace("@", "")
        write_correlation_csv(report, out.with_name(f"{out.stem}_{suffix}.csv"))
        if not args.no_figure:
            from .plotting import save_correlation_figure

            save_correlation_figure(report, out.with_name(f"{out.stem}_{suffix}.png"))
    print(f"report -> {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = SimulationConfig(
        n_passages=args.passages,
        n_topics=args.topics,
        relevant_per_topic=args.relevant,
        n_systems=args.systems,
        run_depth=args.run_depth,
        seed=int(_get(args, "seed", 0)),
    )
    collection = build_collection(cfg)
    runs = build_runs(collection, cfg)
    pairs = all_run_pairs(runs)
    tables = [build_scorer_table(collection, pairs, cfg, seed_offset=i) for i in range(args.scorers)]
    write_collection(collection, runs, tables, args.out_dir)
    print(
        f"simulated {cfg.n_passages} passages, {cfg.n_topics} topics, "
        f"{cfg.n_systems} systems, {args.scorers} scorers -> {args.out_dir}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--seed", type=int, help="random seed for simulation")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="poolkit",
        description="Build and evaluate pooled, human-validated IR test collections.",
    )
    parser.add_argument("--version", action="version", version=f"poolkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chunk", parents=[common], help="split raw documents into passages")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["jsonl", "plaintext_dir"], default="jsonl")
    p.add_argument("--out", required=True)
    p.add_argument("--markers", help="comma-separated article marker patterns")
    p.add_argument("--max-words", type=int, dest="max_words")
    p.add_argument("--min-words", type=int, dest="min_words")
    p.add_argument("--provider-url", dest="provider_url")
    p.add_argument("--embed-dim", type=int, dest="embed_dim")
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("index", parents=[common], help="build the BM25 inverted index")
    p.add_argument("--passages", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search-bm25", parents=[common], help="BM25 retrieval for a topics file")
    p.add_argument("--index", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--topk", type=int)
    p.add_argument("--tag", default="bm25")
    p.set_defaults(func=cmd_search_bm25)

    p = sub.add_parser("embed", parents=[common], help="embed passages into a vector file")
    p.add_argument("--passages", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--provider-url", dest="provider_url")
    p.add_argument("--embed-dim", type=int, dest="embed_dim")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("search-dense", parents=[common], help="exact dense retrieval")
    p.add_argument("--vectors", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--topk", type=int)
    p.add_argument("--tag", default="dense")
    p.add_argument("--provider-url", dest="provider_url")
    p.set_defaults(func=cmd_search_dense)

    p = sub.add_parser("fuse", parents=[common], help="RRF-fuse run files")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rrf-k", type=float, dest="rrf_k")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("pool", parents=[common], help="build the unified candidate pool")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rrf-k", type=float, dest="rrf_k")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("rerank", parents=[common], help="re-score a pool with one scorer")
    p.add_argument("--pool", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scores", help="TSV score file (file-based scorer)")
    p.add_argument("--provider-url", dest="provider_url")
    p.add_argument("--passages", help="passage texts, required for an HTTP scorer")
    p.add_argument("--topics", help="topic texts, required for an HTTP scorer")
    p.add_argument("--tag")
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("pseudo-qrels", parents=[common], help="select top-10 pseudo-judgments")
    p.add_argument("--pool", required=True)
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rrf-k", type=float, dest="rrf_k")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_pseudo_qrels)

    p = sub.add_parser("serve", parents=[common], help="run the annotation HTTP service")
    p.add_argument("--log", required=True, help="append-only JSONL event log")
    p.add_argument("--topics", help="topics JSONL to import")
    p.add_argument("--pseudo-qrels", dest="pseudo_qrels", help="pseudo-qrels JSON to load as tasks")
    p.add_argument("--passages", help="passages JSONL for display texts")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--lease-seconds", type=float, dest="lease_seconds")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export-qrels", parents=[common], help="export qrels from an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--multi-assessor", action="store_true", dest="multi_assessor")
    p.set_defaults(func=cmd_export_qrels)

    p = sub.add_parser("eval", parents=[common], help="per-run retrieval metrics")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--k", type=int, nargs="+", default=[10])
    p.add_argument("--out", help="machine-readable JSONL report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("effort-curve", parents=[common], help="hit@k vs annotation effort saved")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--ks", type=int, nargs="+", default=list(DEFAULT_EFFORT_KS))
    p.add_argument("--depth", type=int, help="pool depth the effort baseline assumes")
    p.add_argument("--out", required=True, help="CSV output (k,effort,hit)")
    p.add_argument("--figure", help="PNG path (default: CSV path with .png)")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_effort_curve)

    p = sub.add_parser("correlate", parents=[common], help="system-ranking agreement of two qrels")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--qrels-a", required=True, dest="qrels_a")
    p.add_argument("--qrels-b", required=True, dest="qrels_b")
    p.add_argument("--metric", nargs="+", default=["mrr@10"])
    p.add_argument("--out", required=True, help="JSONL report; CSV/PNG written alongside")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("simulate", parents=[common], help="generate a planted-relevance collection")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--passages", type=int, default=1000)
    p.add_argument("--topics", type=int, default=50)
    p.add_argument("--relevant", type=int, default=10)
    p.add_argument("--systems", type=int, default=6)
    p.add_argument("--run-depth", type=int, default=100, dest="run_depth")
    p.add_argument("--scorers", type=int, default=3)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.config_values = load_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing-input: {exc.filename or exc}", file=sys.stderr)
    except PoolkitError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: invalid-argument: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())

"""poolkit: build and evaluate pooled, human-validated IR test collections.

The pipeline: chunk a raw corpus into passages, retrieve candidates with BM25
and dense searchers, fuse the runs into a candidate pool, re-rank the pool
with relevance scorers, keep the fused top 10 as pseudo-judgments, and have
humans validate those through the annotation service. The eval module measures
runs and checks how faithfully the validated judgments rank systems.
"""

__version__ = "0.1.0"

from .analysis import AnalyzerConfig, analyze
from .bm25 import Bm25Params, InvertedIndex, bm25_search, build_inverted_index
from .corpus import (
    ChunkConfig,
    CorpusStats,
    Document,
    Passage,
    corpus_stats,
    hybrid_chunk,
    ingest_corpus,
    semantic_chunk,
    structural_chunk,
)
from .dense import VectorStore, dense_search, embed_corpus, read_vectors, write_vectors
from .errors import InputFormatError, LeaseConflictError, PoolkitError, ProviderError
from .eval import (
    CorrelationReport,
    EffortCurve,
    MetricReport,
    Qrels,
    effort_curve,
    evaluate_run,
    generalization_ratio,
    hit_at_k,
    kendall_tau,
    mrr_at_k,
    ndcg_at_k,
    read_qrels,
    recall_at_k,
    spearman_rho,
    system_ranking_correlation,
    write_qrels,
)
from .fusion import CandidatePool, FusionConfig, build_candidate_pool, rrf_fuse
from .judge import (
    FileScorer,
    PseudoQrels,
    build_pseudo_qrels,
    read_scores,
    rerank_pool,
    select_pseudo_judgments,
    write_scores,
)
from .providers import HashingEmbedder, HttpEmbedder, HttpScorer
from .runs import RankedList, RunEntry, ranked_list_from_scores, read_run, write_run

__all__ = [name for name in dir() if not name.startswith("_")]

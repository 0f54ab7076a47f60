"""Corpus ingestion and passage chunking.

Documents are segmented at article markers first (legal texts are organized
into explicitly marked articles); any segment still over the word budget is
refined by embedding-based semantic splitting, and fragments below the merge
threshold are folded into a neighbor. Passage ids are a pure function of
(doc_id, ordinal) so re-running ingestion never changes them.
"""

from __future__ import annotations

import json
import logging
import re
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputFormatError
from .providers import EmbeddingProvider, unit_vector

log = logging.getLogger(__name__)

# Arabic legal articles open with "المادة"; Latin-script sources use "Article".
DEFAULT_MARKERS = ("المادة", "Article")

_SENTENCE_END = (".", "!", "؟", "؛")  # . ! ؟ ؛
_SENTENCE_SPLIT = re.compile(r"(?<=[.!؟؛])\s+")

STRUCTURAL = "structural"
SEMANTIC = "semantic"
WHOLE = "whole"


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Passage:
    passage_id: str
    parent_doc: str
    text: str
    word_count: int
    chunk_method: str


@dataclass(frozen=True)
class ChunkConfig:
    """Chunking knobs. Defaults bracket passage lengths observed in practice (20-450 words)."""

    marker_patterns: tuple[str, ...] = DEFAULT_MARKERS
    max_words: int = 450
    min_words: int = 20
    boundary_threshold_mode: str = "mean_minus_std"
    fixed_threshold: float = 0.0

    def __post_init__(self):
        if not self.max_words > self.min_words > 0:
            raise ValueError(
                f"require max_words > min_words > 0, got {self.max_words}/{self.min_words}"
            )
        if self.boundary_threshold_mode not in ("mean_minus_std", "fixed"):
            raise ValueError(f"unknown threshold mode {self.boundary_threshold_mode!r}")
        if not -1.0 <= self.fixed_threshold <= 1.0:
            raise ValueError(f"fixed_threshold must be in [-1, 1], got {self.fixed_threshold}")


@dataclass(frozen=True)
class CorpusStats:
    passage_count: int
    word_mean: float
    word_std: float
    word_min: int
    word_max: int


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs."""
    return len(text.split())


def passage_id(doc_id: str, ordinal: int) -> str:
    return f"{doc_id}#p{ordinal}"


# ---------------------------------------------------------------------------
# Ingestion


def ingest_corpus(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Load raw documents from a JSONL file or a directory of .txt files."""
    path = Path(path)
    if format == "jsonl":
        return _ingest_jsonl(path)
    if format == "plaintext_dir":
        return _ingest_plaintext_dir(path)
    raise ValueError(f"unknown corpus format {format!r}")


def _ingest_jsonl(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"invalid JSON: {exc}", path=path, line=lineno) from exc
            if not isinstance(record, dict) or "doc_id" not in record or "text" not in record:
                raise InputFormatError(
                    "record must be an object with doc_id and text", path=path, line=lineno
                )
            doc_id = str(record["doc_id"])
            text = str(record["text"])
            if not doc_id:
                raise InputFormatError("empty doc_id", path=path, line=lineno)
            if not text.strip():
                raise InputFormatError(f"document {doc_id!r} has empty text", path=path, line=lineno)
            if doc_id in seen:
                raise InputFormatError(f"duplicate doc_id {doc_id!r}", path=path, line=lineno)
            seen.add(doc_id)
            meta = {str(k): str(v) for k, v in (record.get("meta") or {}).items()}
            docs.append(Document(doc_id=doc_id, text=text, meta=meta))
    return docs


def _ingest_plaintext_dir(path: Path) -> list[Document]:
    docs = []
    for file in sorted(path.glob("*.txt")):
        text = file.read_text(encoding="utf-8")
        if not text.strip():
            raise InputFormatError("empty document", path=file)
        docs.append(Document(doc_id=file.stem, text=text, meta={"source": file.name}))
    return docs


# ---------------------------------------------------------------------------
# Chunking


def _at_segment_start(text: str, pos: int) -> bool:
    """A marker only counts at the start of the text, a line, or a sentence."""
    head = text[:pos].rstrip(" \t")
    if not head or head.endswith("\n"):
        return True
    return head.rstrip().endswith(_SENTENCE_END)


def _marker_positions(text: str, markers: Sequence[str]) -> list[int]:
    positions = set()
    for pattern in markers:
        for m in re.finditer(pattern, text):
            if _at_segment_start(text, m.start()):
                positions.add(m.start())
    return sorted(positions)


def _structural_pieces(text: str, markers: Sequence[str]) -> list[tuple[str, str]]:
    """Split at article markers; returns (text, chunk_method) pairs in document order."""
    positions = _marker_positions(text, markers)
    if not positions:
        return [(text.strip(), WHOLE)]
    cuts = positions + [len(text)]
    pieces = []
    preamble = text[: positions[0]].strip()
    if preamble:
        pieces.append((preamble, STRUCTURAL))
    for start, end in zip(cuts, cuts[1:]):
        segment = text[start:end].strip()
        if segment:
            pieces.append((segment, STRUCTURAL))
    return pieces


def split_sentences(text: str) -> list[str]:
    """Split on Arabic/Latin sentence punctuation followed by whitespace."""
    return [s for s in _SENTENCE_SPLIT.split(text.strip()) if s.strip()]


def _hard_split(sentence: str, max_words: int) -> list[str]:
    words = sentence.split()
    return [" ".join(words[i : i + max_words]) for i in range(0, len(words), max_words)]


def _pack_sentences(sentences: list[str], max_words: int) -> list[str]:
    """Greedily pack consecutive sentences into pieces of at most max_words words."""
    pieces: list[str] = []
    current: list[str] = []
    current_words = 0

    def flush():
        nonlocal current, current_words
        if current:
            pieces.append(" ".join(current))
            current = []
            current_words = 0

    for sentence in sentences:
        n = word_count(sentence)
        if n > max_words:
            log.warning("sentence of %d words exceeds budget %d; hard-splitting", n, max_words)
            flush()
            pieces.extend(_hard_split(sentence, max_words))
            continue
        if current_words + n > max_words:
            flush()
        current.append(sentence)
        current_words += n
    flush()
    return pieces


def _semantic_pieces(text: str, embedder: EmbeddingProvider, cfg: ChunkConfig) -> list[str]:
    sentences = split_sentences(text)
    if len(sentences) <= 1:
        return _pack_sentences(sentences, cfg.max_words)

    vectors = [unit_vector(v) for v in embedder.embed(sentences)]
    sims = [
        sum(a * b for a, b in zip(vectors[i], vectors[i + 1]))
        for i in range(len(vectors) - 1)
    ]
    if cfg.boundary_threshold_mode == "fixed":
        threshold = cfg.fixed_threshold
    else:
        threshold = statistics.fmean(sims) - statistics.pstdev(sims)

    # A boundary after sentence i means sim(i, i+1) fell strictly below threshold.
    groups: list[list[str]] = [[sentences[0]]]
    for i, sim in enumerate(sims):
        if sim < threshold:
            groups.append([])
        groups[-1].append(sentences[i + 1])

    pieces: list[str] = []
    for group in groups:
        pieces.extend(_pack_sentences(group, cfg.max_words))
    return pieces


def semantic_chunk(
    text: str,
    embedder: EmbeddingProvider,
    cfg: ChunkConfig = ChunkConfig(),
    parent_doc: str = "",
) -> list[Passage]:
    """Split over-budget text at semantic boundaries; every output is <= cfg.max_words."""
    if word_count(text) <= cfg.max_words:
        raise ValueError("semantic_chunk expects text longer than cfg.max_words")
    pieces = _semantic_pieces(text, embedder, cfg)
    return [
        Passage(passage_id(parent_doc, i), parent_doc, t, word_count(t), SEMANTIC)
        for i, t in enumerate(pieces, start=1)
    ]


def structural_chunk(doc: Document, markers: Sequence[str] = DEFAULT_MARKERS) -> list[Passage]:
    """Split a document at article markers; no match yields one whole-document passage."""
    return [
        Passage(passage_id(doc.doc_id, i), doc.doc_id, text, word_count(text), method)
        for i, (text, method) in enumerate(_structural_pieces(doc.text, markers), start=1)
    ]


def _merge_small_pieces(
    pieces: list[tuple[str, str]], cfg: ChunkConfig
) -> list[tuple[str, str]]:
    """Fold pieces under min_words into a neighbor, never exceeding max_words.

    Preference order per the merge rule: successor first, predecessor for the
    last piece (or when the successor would overflow the budget). A small
    piece with no fitting neighbor is kept as-is.
    """
    pieces = list(pieces)
    while True:
        merged_any = False
        for i, (text, _method) in enumerate(pieces):
            if word_count(text) >= cfg.min_words or len(pieces) == 1:
                continue
            words = word_count(text)
            if i + 1 < len(pieces) and words + word_count(pieces[i + 1][0]) <= cfg.max_words:
                nxt_text, nxt_method = pieces[i + 1]
                pieces[i : i + 2] = [(text + "\n" + nxt_text, nxt_method)]
                merged_any = True
                break
            if i > 0 and words + word_count(pieces[i - 1][0]) <= cfg.max_words:
                prev_text, prev_method = pieces[i - 1]
                pieces[i - 1 : i + 1] = [(prev_text + "\n" + text, prev_method)]
                merged_any = True
                break
        if not merged_any:
            return pieces


def hybrid_chunk(
    doc: Document, embedder: EmbeddingProvider, cfg: ChunkConfig = ChunkConfig()
) -> list[Passage]:
    """Structural split, semantic refinement of over-budget articles, small-piece merge."""
    pieces: list[tuple[str, str]] = []
    for text, method in _structural_pieces(doc.text, cfg.marker_patterns):
        if word_count(text) > cfg.max_words:
            pieces.extend((t, SEMANTIC) for t in _semantic_pieces(text, embedder, cfg))
        else:
            pieces.append((text, method))
    pieces = _merge_small_pieces(pieces, cfg)
    return [
        Passage(passage_id(doc.doc_id, i), doc.doc_id, text, word_count(text), method)
        for i, (text, method) in enumerate(pieces, start=1)
    ]


def chunk_corpus(
    docs: Iterable[Document], embedder: EmbeddingProvider, cfg: ChunkConfig = ChunkConfig()
) -> list[Passage]:
    passages = []
    for doc in docs:
        passages.extend(hybrid_chunk(doc, embedder, cfg))
    return passages


# ---------------------------------------------------------------------------
# Statistics and passage files


def corpus_stats(passages: Sequence[Passage]) -> CorpusStats:
    """Population statistics over passage word counts; all-zero for an empty corpus."""
    if not passages:
        return CorpusStats(0, 0.0, 0.0, 0, 0)
    counts = [p.word_count for p in passages]
    return CorpusStats(
        passage_count=len(counts),
        word_mean=statistics.fmean(counts),
        word_std=statistics.pstdev(counts),
        word_min=min(counts),
        word_max=max(counts),
    )


def read_topics(path: str | Path) -> dict[str, str]:
    """Load a topics JSONL file ({"topic_id", "text"} per line) as id -> text."""
    topics: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                topic_id = str(record["topic_id"])
                text = str(record["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputFormatError(f"invalid topic record: {exc}", path=path, line=lineno) from exc
            if topic_id in topics:
                raise InputFormatError(f"duplicate topic_id {topic_id!r}", path=path, line=lineno)
            if not text.strip():
                raise InputFormatError(f"topic {topic_id!r} has empty text", path=path, line=lineno)
            topics[topic_id] = text
    return topics


def write_topics(topics: dict[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for topic_id, text in topics.items():
            fh.write(json.dumps({"topic_id": topic_id, "text": text}, ensure_ascii=False) + "\n")


def write_passages(passages: Iterable[Passage], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in passages:
            record = {
                "passage_id": p.passage_id,
                "parent_doc": p.parent_doc,
                "text": p.text,
                "word_count": p.word_count,
                "chunk_method": p.chunk_method,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_passages(path: str | Path) -> list[Passage]:
    passages = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                p = Passage(
                    passage_id=str(r["passage_id"]),
                    parent_doc=str(r["parent_doc"]),
                    text=str(r["text"]),
                    word_count=int(r["word_count"]),
                    chunk_method=str(r["chunk_method"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise InputFormatError(f"invalid passage record: {exc}", path=path, line=lineno) from exc
            if p.passage_id in seen:
                raise InputFormatError(
                    f"duplicate passage_id {p.passage_id!r}", path=path, line=lineno
                )
            if p.word_count != word_count(p.text):
                raise InputFormatError(
                    f"word_count {p.word_count} does not match text for {p.passage_id!r}",
                    path=path,
                    line=lineno,
                )
            seen.add(p.passage_id)
            passages.append(p)
    return passages

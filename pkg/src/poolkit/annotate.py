"""Event-sourced annotation service: topic intake, task leasing, judgment capture.

Every state change is an event appended to a JSONL log; replaying the log
reconstructs the exact service state, so the log is the only persistence.
Task leasing is serialized through a lock, making it linearizable: two
assessors polling concurrently can never receive the same pending task.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import InputFormatError, LeaseConflictError
from .judge import PseudoQrels

DEFAULT_LEASE_SECONDS = 900.0  # abandoned browser sessions must not starve the queue

PENDING = "pending"
ASSIGNED = "assigned"
DONE = "done"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict
    at: float


@dataclass(frozen=True)
class Topic:
    topic_id: str
    text: str
    author: str
    created_at: float


@dataclass
class JudgmentTask:
    task_id: str
    topic_id: str
    passage_id: str
    pseudo_rank: int
    leased_to: str | None = None
    lease_expires_at: float = 0.0
    done: bool = False

    def status(self, now: float) -> str:
        if self.done:
            return DONE
        if self.leased_to is not None and now < self.lease_expires_at:
            return ASSIGNED
        return PENDING  # never leased, or lease expired


@dataclass(frozen=True)
class Judgment:
    topic_id: str
    passage_id: str
    label: int
    assessor: str
    at: float


def task_id_for(topic_id: str, passage_id: str) -> str:
    return f"{topic_id}::{passage_id}"


@dataclass
class AnnotationState:
    """Pure fold of the event log; no validation, so replay is total."""

    topics: dict[str, Topic] = field(default_factory=dict)
    tasks: dict[str, JudgmentTask] = field(default_factory=dict)
    # latest judgment per (topic, passage, assessor); later events overwrite
    judgments: dict[tuple[str, str, str], Judgment] = field(default_factory=dict)
    topic_seq: int = 0
    last_seq: int = 0

    def apply(self, event: Event) -> None:
        self.last_seq = event.seq
        payload = event.payload
        if event.kind == "topic_created":
            topic = Topic(
                topic_id=payload["topic_id"],
                text=payload["text"],
                author=payload["author"],
                created_at=event.at,
            )
            self.topics[topic.topic_id] = topic
            self.topic_seq = max(self.topic_seq, int(payload["topic_seq"]))
        elif event.kind == "tasks_loaded":
            for topic_id, pid, pseudo_rank in payload["entries"]:
                tid = task_id_for(topic_id, pid)
                if tid not in self.tasks:
                    self.tasks[tid] = JudgmentTask(tid, topic_id, pid, int(pseudo_rank))
        elif event.kind == "task_leased":
            task = self.tasks[payload["task_id"]]
            task.leased_to = payload["assessor"]
            task.lease_expires_at = float(payload["expires_at"])
        elif event.kind == "judgment_submitted":
            task = self.tasks[payload["task_id"]]
            task.done = True
            judgment = Judgment(
                topic_id=task.topic_id,
                passage_id=task.passage_id,
                label=int(payload["label"]),
                assessor=payload["assessor"],
                at=event.at,
            )
            self.judgments[(task.topic_id, task.passage_id, judgment.assessor)] = judgment
        else:
            raise ValueError(f"unknown event kind {event.kind!r}")

    def snapshot(self, now: float) -> str:
        """Canonical JSON rendering of the state, for replay-equality checks."""
        return json.dumps(
            {
                "topics": {
                    t.topic_id: [t.text, t.author, t.created_at]
                    for t in self.topics.values()
                },
                "tasks": {
                    t.task_id: [t.topic_id, t.passage_id, t.pseudo_rank, t.status(now),
                                t.leased_to, t.lease_expires_at]
                    for t in self.tasks.values()
                },
                "judgments": {
                    "|".join(k): [j.label, j.at] for k, j in self.judgments.items()
                },
                "last_seq": self.last_seq,
            },
            sort_keys=True,
            ensure_ascii=False,
        )


class AnnotationService:
    """Validating front end over an AnnotationState plus an append-only log."""

    def __init__(
        self,
        log_path: str | Path | None = None,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        clock: Callable[[], float] = time.time,
        multi_assessor: bool = False,
    ):
        self.state = AnnotationState()
        self.lease_seconds = lease_seconds
        self.clock = clock
        self.multi_assessor = multi_assessor
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path is not None else None
        self.events: list[Event] = []
        if self._log_path is not None and self._log_path.exists():
            for event in read_log(self._log_path):
                self.events.append(event)
                self.state.apply(event)

    # -- event plumbing ----------------------------------------------------

    def _record(self, kind: str, payload: dict) -> Event:
        event = Event(seq=self.state.last_seq + 1, kind=kind, payload=payload, at=self.clock())
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(_event_line(event))
        self.events.append(event)
        self.state.apply(event)
        return event

    # -- operations ---------------------------------------------------------

    def submit_topic(self, text: str, author: str) -> Topic:
        if not text or not text.strip():
            raise ValueError("topic text must be non-empty")
        if not author or not author.strip():
            raise ValueError("author must be non-empty")
        with self._lock:
            topic_seq = self.state.topic_seq + 1
            while f"t{topic_seq}" in self.state.topics:  # imported ids may occupy slots
                topic_seq += 1
            topic_id = f"t{topic_seq}"
            self._record(
                "topic_created",
                {"topic_id": topic_id, "text": text, "author": author, "topic_seq": topic_seq},
            )
            return self.state.topics[topic_id]

    def import_topics(self, topics: dict[str, str], author: str = "import") -> int:
        """Register pre-existing topics under their own ids; existing ids are skipped."""
        imported = 0
        with self._lock:
            for topic_id, text in topics.items():
                if topic_id in self.state.topics:
                    continue
                if not text.strip():
                    raise ValueError(f"topic {topic_id!r} has empty text")
                self._record(
                    "topic_created",
                    {
                        "topic_id": topic_id,
                        "text": text,
                        "author": author,
                        "topic_seq": self.state.topic_seq,
                    },
                )
                imported += 1
        return imported

    def load_pseudo_qrels(self, pq: PseudoQrels) -> int:
        """Create one pending task per entry; reloading skips existing tasks."""
        unknown = [t for t in pq.topics() if t not in self.state.topics]
        if unknown:
            raise ValueError(f"unknown topic {unknown[0]!r}; create topics first")
        with self._lock:
            new_entries = [
                [topic_id, pid, rank]
                for topic_id, pid, rank in pq.entries
                if task_id_for(topic_id, pid) not in self.state.tasks
            ]
            if new_entries:
                self._record(
                    "tasks_loaded", {"entries": new_entries, "provenance": pq.provenance}
                )
            return len(new_entries)

    def next_task(self, assessor: str) -> JudgmentTask | None:
        """Lease the lowest-(topic, pseudo_rank) pending task; None when all are done."""
        if not assessor or not assessor.strip():
            raise ValueError("assessor must be non-empty")
        with self._lock:
            now = self.clock()
            pending = [t for t in self.state.tasks.values() if t.status(now) == PENDING]
            if not pending:
                return None
            task = min(pending, key=lambda t: (t.topic_id, t.pseudo_rank, t.passage_id))
            self._record(
                "task_leased",
                {
                    "task_id": task.task_id,
                    "assessor": assessor,
                    "expires_at": now + self.lease_seconds,
                },
            )
            return self.state.tasks[task.task_id]

    def submit_judgment(self, task_id: str, label: int, assessor: str) -> Judgment:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        with self._lock:
            task = self.state.tasks.get(task_id)
            if task is None:
                raise KeyError(f"unknown task {task_id!r}")
            now = self.clock()
            status = task.status(now)
            if status == DONE:
                prior = self.state.judgments.get((task.topic_id, task.passage_id, assessor))
                if prior is None and not self.multi_assessor:
                    raise LeaseConflictError(
                        f"task {task_id!r} already judged by another assessor"
                    )
                # latest event wins: the same assessor may overwrite their label;
                # multi-assessor mode additionally accepts further opinions
            elif status != ASSIGNED or task.leased_to != assessor:
                raise LeaseConflictError(
                    f"task {task_id!r} is not leased to {assessor!r} (status: {status})"
                )
            self._record(
                "judgment_submitted",
                {"task_id": task_id, "label": label, "assessor": assessor},
            )
            return self.state.judgments[(task.topic_id, task.passage_id, assessor)]

    def progress(self) -> dict[str, int]:
        with self._lock:
            now = self.clock()
            counts = {PENDING: 0, ASSIGNED: 0, DONE: 0}
            for task in self.state.tasks.values():
                counts[task.status(now)] += 1
            return counts

    def export_qrels(self, multi_assessor: bool = False) -> str:
        """TREC qrels lines for every judged (topic, passage), sorted.

        Single-assessor mode (default) takes the latest judgment per pair.
        Multi-assessor mode takes the majority label over assessors' latest
        judgments; an exact tie exports 0.
        """
        with self._lock:
            per_pair: dict[tuple[str, str], list[Judgment]] = {}
            for judgment in self.state.judgments.values():
                per_pair.setdefault((judgment.topic_id, judgment.passage_id), []).append(judgment)
            lines = []
            for (topic_id, pid), group in sorted(per_pair.items()):
                if multi_assessor:
                    ones = sum(1 for j in group if j.label == 1)
                    label = 1 if ones * 2 > len(group) else 0
                else:
                    label = max(group, key=lambda j: j.at).label
                lines.append(f"{topic_id} 0 {pid} {label}\n")
            return "".join(lines)


# ---------------------------------------------------------------------------
# Log file format


def _event_line(event: Event) -> str:
    record = {"seq": event.seq, "kind": event.kind, "payload": event.payload, "at": event.at}
    return json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"


def write_log(events: Iterable[Event], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for event in events:
            fh.write(_event_line(event))


def read_log(path: str | Path) -> list[Event]:
    events = []
    previous_seq = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                event = Event(
                    seq=int(record["seq"]),
                    kind=str(record["kind"]),
                    payload=dict(record["payload"]),
                    at=float(record["at"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise InputFormatError(f"invalid event: {exc}", path=path, line=lineno) from exc
            if event.seq <= previous_seq:
                raise InputFormatError(
                    f"sequence numbers must increase (got {event.seq} after {previous_seq})",
                    path=path,
                    line=lineno,
                )
            previous_seq = event.seq
            events.append(event)
    return events


def replay(events: Sequence[Event]) -> AnnotationState:
    """Fold events into a fresh state; the result is a pure function of the log."""
    state = AnnotationState()
    for event in events:
        state.apply(event)
    return state

"""HTTP surface of the annotation service.

JSON endpoints consumed by the browser frontend:

    POST /topics            {"text": ..., "author": ...}
    GET  /tasks/next?assessor=...
    POST /judgments         {"task_id": ..., "label": 0|1, "assessor": ...}
    GET  /progress
    GET  /export/qrels      (text/plain TREC qrels)
"""

from __future__ import annotations

from typing import Mapping

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .annotate import AnnotationService, JudgmentTask
from .errors import LeaseConflictError


class TopicIn(BaseModel):
    text: str
    author: str


class JudgmentIn(BaseModel):
    task_id: str
    label: int
    assessor: str


def _task_json(task: JudgmentTask, topics, passages: Mapping[str, str]) -> dict:
    topic = topics.get(task.topic_id)
    return {
        "task_id": task.task_id,
        "topic_id": task.topic_id,
        "passage_id": task.passage_id,
        "pseudo_rank": task.pseudo_rank,
        "topic_text": topic.text if topic else "",
        "passage_text": passages.get(task.passage_id, ""),
        "lease_expires_at": task.lease_expires_at,
    }


def create_app(service: AnnotationService, passages: Mapping[str, str] | None = None) -> FastAPI:
    """Wrap a service in the HTTP API; ``passages`` supplies display texts."""
    passages = passages or {}
    app = FastAPI(title="poolkit annotation service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/topics")
    def create_topic(body: TopicIn):
        try:
            topic = service.submit_topic(body.text, body.author)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"topic_id": topic.topic_id, "text": topic.text, "author": topic.author}

    @app.get("/tasks/next")
    def next_task(assessor: str = Query(...)):
        try:
            task = service.next_task(assessor)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if task is None:
            return {"task": None}
        return {"task": _task_json(task, service.state.topics, passages)}

    @app.post("/judgments")
    def submit_judgment(body: JudgmentIn):
        try:
            judgment = service.submit_judgment(body.task_id, body.label, body.assessor)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except LeaseConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {
            "ok": True,
            "topic_id": judgment.topic_id,
            "passage_id": judgment.passage_id,
            "label": judgment.label,
        }

    @app.get("/progress")
    def progress():
        return service.progress()

    @app.get("/export/qrels", response_class=PlainTextResponse)
    def export_qrels(multi_assessor: bool = False):
        return service.export_qrels(multi_assessor=multi_assessor)

    return app

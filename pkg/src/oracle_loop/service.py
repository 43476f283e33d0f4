"""HTTP facade over the session engine.

Sessions live in memory, keyed by id.  Mutations on one session are
serialized through a per-session lock; an answer can only be posted for a
query the client has fetched, so a duplicated POST is rejected with 409
instead of silently answering the next query.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .diagnosis import AlreadyValidError, FaultProbabilities, NoDiagnosisError
from .experts import Answer, AnswerKind
from .kb import KnowledgeBase, parse_kb
from .queries import Heuristic, Query
from .session import (
    QueryType,
    SessionConfig,
    SessionState,
    integrate_answer,
    new_session,
)
from .syntax import ParseError


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class ConfigBody(BaseModel):
    queryType: str = "sq"
    heuristic: str = "ent"
    leadingCap: int = 9
    faultProbsText: str | None = None


class CreateSessionBody(BaseModel):
    kbText: str
    config: ConfigBody = ConfigBody()


class AnswerBody(BaseModel):
    labels: list[tuple[int, bool]] | None = None
    whole: bool | None = None


@dataclass
class _Handle:
    """One live session plus the bookkeeping the HTTP layer needs."""

    session_id: str
    state: SessionState
    created_at: float
    armed: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


def _render_axioms(kb: KnowledgeBase, axiom_ids) -> list[dict]:
    return [{"id": ax, "text": kb.axioms[ax].source_text} for ax in sorted(axiom_ids)]


def _snapshot(handle: _Handle) -> dict:
    state = handle.state
    diagnoses = [
        {
            "axiomIds": sorted(d.axiom_ids),
            "axioms": [state.kb.axioms[ax].source_text for ax in sorted(d.axiom_ids)],
            "probability": p,
        }
        for d, p in zip(state.ds.diagnoses, state.ds.probs)
    ]
    history = [
        {
            "query": {"axiomIds": list(q.axiom_ids)},
            "answer": {
                "kind": a.kind.value,
                "labels": [[ax, value] for ax, value in a.labels],
                "effort": a.effort,
            },
        }
        for q, a in state.history
    ]
    return {
        "sessionId": handle.session_id,
        "finished": state.finished,
        "result": None if state.result is None
        else {"axiomIds": sorted(state.result.axiom_ids),
              "axioms": [state.kb.axioms[ax].source_text
                         for ax in sorted(state.result.axiom_ids)]},
        "diagnoses": diagnoses,
        "complete": state.ds.complete,
        "history": history,
        "metrics": {
            "numQueries": state.metrics.num_queries,
            "numAxioms": state.metrics.num_axioms,
            "totalSelectionNanos": state.metrics.compute_time_nanos,
            "perIterationNanos": list(state.metrics.per_iteration_nanos),
        },
    }


def _build_config(body: ConfigBody) -> tuple[QueryType, Heuristic, int]:
    try:
        query_type = QueryType(body.queryType)
    except ValueError:
        raise ApiError(400, "bad_request", f"unknown queryType {body.queryType!r}")
    try:
        heuristic = Heuristic(body.heuristic)
    except ValueError:
        raise ApiError(400, "bad_request", f"unknown heuristic {body.heuristic!r}")
    if body.leadingCap < 2:
        raise ApiError(400, "bad_request", "leadingCap must be at least 2")
    return query_type, heuristic, body.leadingCap


def _answer_from_body(query: Query, body: AnswerBody) -> Answer:
    if (body.labels is None) == (body.whole is None):
        raise ApiError(400, "bad_request", "provide exactly one of `labels` or `whole`")
    if body.whole is not None:
        kind = AnswerKind.WHOLE_QUERY_TRUE if body.whole else AnswerKind.WHOLE_QUERY_FALSE
        return Answer(kind, (), len(query))
    if not body.labels:
        raise ApiError(400, "bad_request", "`labels` must not be empty")
    labels = tuple((int(ax), bool(value)) for ax, value in body.labels)
    positions = {ax: i for i, ax in enumerate(query.axiom_ids)}
    last = max((positions.get(ax, -1) for ax, _ in labels), default=-1)
    effort = last + 1 if last >= 0 else len(labels)
    return Answer(AnswerKind.AXIOM_LABELS, labels, effort)


def create_app(ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="oracle-loop", version=__version__)
    sessions: dict[str, _Handle] = {}
    app.state.sessions = sessions

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse({"code": exc.code, "message": exc.message}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse({"code": "bad_request", "message": str(exc)}, status_code=400)

    def _get_handle(session_id: str) -> _Handle:
        handle = sessions.get(session_id)
        if handle is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return handle

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        query_type, heuristic, leading_cap = _build_config(body.config)
        try:
            kb = parse_kb(body.kbText)
        except ParseError as exc:
            raise ApiError(400, "parse_error", str(exc))
        probs = None
        if body.config.faultProbsText is not None:
            try:
                probs = FaultProbabilities.from_text(body.config.faultProbsText, kb)
            except ValueError as exc:
                raise ApiError(400, "bad_request", f"fault probabilities: {exc}")
        config = SessionConfig(query_type=query_type, heuristic=heuristic,
                               leading_cap=leading_cap, fault_probs=probs)
        try:
            state = new_session(kb, config)
        except AlreadyValidError as exc:
            raise ApiError(422, "already_valid", str(exc))
        except NoDiagnosisError as exc:
            raise ApiError(422, "no_diagnosis", str(exc))
        handle = _Handle(session_id=uuid.uuid4().hex, state=state, created_at=time.time())
        sessions[handle.session_id] = handle
        return _snapshot(handle)

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        handle = _get_handle(session_id)
        with handle.lock:
            state = handle.state
            if state.finished:
                return {
                    "finished": True,
                    "result": {"axiomIds": sorted(state.result.axiom_ids),
                               "axioms": [state.kb.axioms[ax].source_text
                                          for ax in sorted(state.result.axiom_ids)]},
                }
            handle.armed = True
            return {
                "finished": False,
                "query": _render_axioms(state.kb, state.pending.axiom_ids),
            }

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody):
        handle = _get_handle(session_id)
        if not handle.lock.acquire(blocking=False):
            raise ApiError(409, "busy", "another update for this session is in progress")
        try:
            state = handle.state
            if state.finished:
                raise ApiError(409, "finished", "the session is already finished")
            if not handle.armed:
                raise ApiError(409, "no_pending_query",
                               "fetch the query before posting an answer")
            answer = _answer_from_body(state.pending, body)
            try:
                new_state = integrate_answer(state, state.pending, answer)
            except NoDiagnosisError as exc:
                raise ApiError(409, "inconsistent_answers", str(exc))
            except ValueError as exc:
                raise ApiError(400, "bad_request", str(exc))
            handle.state = new_state
            handle.armed = False
        finally:
            handle.lock.release()
        return _snapshot(handle)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return _snapshot(_get_handle(session_id))

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        handle = sessions.pop(session_id, None)
        if handle is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")

    root = Path(ui_dir) if ui_dir is not None else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if root.is_dir():
        app.mount("/ui", StaticFiles(directory=root, html=True), name="ui")
    else:
        @app.get("/ui", response_class=HTMLResponse)
        def ui_placeholder():
            return "<h1>oracle-loop</h1><p>The web UI has not been built.</p>"

    @app.get("/", include_in_schema=False)
    def index():
        return RedirectResponse("/ui")

    return app

"""HTTP session service for the interactive categorization loop.

Sessions live in memory; every mutation (propagate, assign, undo) works on
a copy-on-write snapshot stack, so undo restores the exact previous state.
Report payloads are serialized through the same dump as the CLI and are
byte-identical for identical states.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware

from .errors import (
    CategoryNotInCandidatesError,
    CodecatError,
    DanglingEndpointError,
    DocumentParseError,
    DuplicateSeedError,
    DuplicateUnitError,
    EmptySpecificSetError,
    IncompleteAssignmentError,
    LatticeValidationError,
    UnknownCategoryError,
    UnknownUnitError,
)
from .graph import graph_from_doc
from .inference import InferenceState, check_violations, init_state, seeds_from_doc
from .lattice import lattice_from_doc
from .reports import (
    candidate_report_doc,
    dump_doc,
    propagation_report_doc,
    state_export_doc,
    state_view_doc,
    violation_report_doc,
)


@dataclass
class _Entry:
    state: InferenceState
    diff: dict


@dataclass
class Session:
    id: str
    entries: list[_Entry]
    lock: threading.Lock = field(default_factory=threading.Lock)
    created: float = field(default_factory=time.time)
    modified: float = field(default_factory=time.time)

    @property
    def current(self) -> _Entry:
        return self.entries[-1]


def _error_code(exc: CodecatError) -> str:
    if isinstance(exc, LatticeValidationError):
        return exc.findings[0].code if exc.findings else "InvalidLattice"
    return {
        DocumentParseError: "ParseError",
        DanglingEndpointError: "DanglingEndpoint",
        DuplicateUnitError: "DuplicateUnitId",
        DuplicateSeedError: "DuplicateSeed",
        UnknownUnitError: "UnknownUnit",
        UnknownCategoryError: "UnknownCategory",
        CategoryNotInCandidatesError: "CategoryNotInCandidates",
        IncompleteAssignmentError: "IncompleteAssignment",
        EmptySpecificSetError: "EmptySpecificSet",
    }.get(type(exc), type(exc).__name__)


def create_app(persist_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="codecat session service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def doc_response(doc: dict, status: int = 200) -> Response:
        return Response(
            content=dump_doc(doc), media_type="application/json", status_code=status
        )

    def error(status: int, exc: CodecatError, **extra) -> Response:
        body = {"error": _error_code(exc), "detail": str(exc), **extra}
        return doc_response(body, status)

    def not_found(session_id: str) -> Response:
        return doc_response(
            {"error": "UnknownSession", "detail": f"no session {session_id!r}"}, 404
        )

    def persist(session: Session) -> None:
        if persist_dir is None:
            return
        directory = Path(persist_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{session.id}.json"
        path.write_text(dump_doc(state_export_doc(session.current.state)), encoding="utf-8")

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)):
        try:
            lattice = lattice_from_doc(payload.get("categories"))
            graph = graph_from_doc(payload.get("graph"))
            seeds = seeds_from_doc(payload.get("seeds", {"assignments": []}))
            state = init_state(graph, lattice, seeds)
        except CodecatError as exc:
            return error(400, exc)
        session = Session(id=uuid.uuid4().hex, entries=[_Entry(state, {})])
        sessions[session.id] = session
        persist(session)
        return doc_response(
            {"id": session.id, "state": state_view_doc(state)}, status=201
        )

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        entry = session.current
        return doc_response(state_view_doc(entry.state, entry.diff))

    @app.post("/sessions/{session_id}/propagate")
    def post_propagate(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        with session.lock:
            working = session.current.state.clone()
            report = working.propagate()
            diff = {
                unit: {"before": sorted(b), "after": sorted(a)}
                for unit, (b, a) in report.changed.items()
            }
            session.entries.append(_Entry(working, diff))
            session.modified = time.time()
            persist(session)
            return doc_response(
                {
                    "report": propagation_report_doc(report),
                    "state": state_view_doc(working, diff),
                }
            )

    @app.post("/sessions/{session_id}/assign")
    def post_assign(session_id: str, payload: dict = Body(...)):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        unit = payload.get("unit")
        category = payload.get("category")
        force = bool(payload.get("force", False))
        if not isinstance(unit, str) or not isinstance(category, str):
            return error(400, DocumentParseError("assign needs string 'unit' and 'category'"))
        with session.lock:
            working = session.current.state.clone()
            before = dict(working.candidates)
            try:
                result = working.assign(unit, category, force=force)
            except CategoryNotInCandidatesError as exc:
                return error(409, exc, candidates=sorted(exc.candidates))
            except CodecatError as exc:
                return error(400, exc)
            if result is not working:
                # forced rebuild: narrowing cannot be widened in place
                result.propagate()
            diff = {
                u: {"before": sorted(before[u]), "after": sorted(result.candidates[u])}
                for u in sorted(before)
                if before[u] != result.candidates[u]
            }
            session.entries.append(_Entry(result, diff))
            session.modified = time.time()
            persist(session)
            return doc_response(state_view_doc(result, diff))

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        with session.lock:
            if len(session.entries) <= 1:
                return doc_response(
                    {"error": "NothingToUndo", "detail": "history holds only the initial state"},
                    409,
                )
            session.entries.pop()
            session.modified = time.time()
            persist(session)
            entry = session.current
            return doc_response(state_view_doc(entry.state, entry.diff))

    @app.get("/sessions/{session_id}/candidates")
    def get_candidates(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        try:
            report = session.current.state.generation_candidates()
        except EmptySpecificSetError as exc:
            return error(409, exc)
        return doc_response(candidate_report_doc(report))

    @app.get("/sessions/{session_id}/violations")
    def get_violations(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        state = session.current.state
        try:
            assignment = state.resolved_assignment()
        except IncompleteAssignmentError as exc:
            return error(409, exc, missing=sorted(exc.missing))
        report = check_violations(state.graph, state.lattice, assignment)
        return doc_response(violation_report_doc(report))

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return not_found(session_id)
        return doc_response(state_export_doc(session.current.state))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app

"""HTTP session service.

Thin translation layer: every route delegates to the session and the
library modules, maps module errors onto status codes (404 unknown ids,
409 stale operations, 422 validation) and responds with the same JSON
shapes the CLI emits.
"""

from __future__ import annotations

import json
import pathlib

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import (
    SheetStructError, StaleCandidate, StalePlan, UnknownGroup, UnknownSheet,
    UnknownViolation,
)
from .grid import parse_a1
from .model import import_csv, load_json, save_json
from .session import Session, UnknownCandidate
from .structure import model_to_json, perspective

DEFAULT_PORT = 7345

_NOT_FOUND = (UnknownGroup, UnknownViolation, UnknownCandidate, UnknownSheet)
_CONFLICT = (StaleCandidate, StalePlan)


class UnknownSession(SheetStructError):
    code = "UnknownSession"


def create_app() -> FastAPI:
    app = FastAPI(title="sheetstruct")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    sessions: dict = {}

    @app.exception_handler(SheetStructError)
    async def _handle(_request: Request, exc: SheetStructError):
        if isinstance(exc, (UnknownSession,) + _NOT_FOUND):
            status = 404
        elif isinstance(exc, _CONFLICT):
            status = 409
        else:
            status = 422
        return JSONResponse(status_code=status, content={"error": exc.to_json()})

    def get_session(session_id: str) -> Session:
        try:
            return sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id!r}") from None

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        raw = await request.body()
        ctype = request.headers.get("content-type", "")
        if "csv" in ctype:
            wb = import_csv(raw, "Sheet1")
        else:
            wb = load_json(raw)
        session = Session(wb)
        sessions[session.id] = session
        return {"sessionId": session.id}

    @app.get("/sessions/{session_id}/workbook")
    async def get_workbook(session_id: str):
        s = get_session(session_id)
        return {"workbook": json.loads(save_json(s.wb)),
                "values": s.values_json()}

    @app.get("/sessions/{session_id}/structure")
    async def get_structure(session_id: str, request: Request):
        s = get_session(session_id)
        params = dict(request.query_params)
        kind = params.get("perspective", "formula-groups")
        if kind == "graph":
            kind = "group-graph"
        if kind == "model":
            return model_to_json(s.model)
        addr = None
        if params.get("addr"):
            addr = parse_a1(params["addr"], s.wb.default_sheet)
        return perspective(s.model, kind, group_id=params.get("group"), addr=addr)

    @app.get("/sessions/{session_id}/violations")
    async def get_violations(session_id: str):
        return get_session(session_id).report.to_json()

    @app.post("/sessions/{session_id}/edits")
    async def post_edits(session_id: str, request: Request):
        s = get_session(session_id)
        batch = await request.json()
        with s.lock:
            changed = s.edit(batch)
            return {"changedValues": changed, "report": s.report.to_json()}

    @app.post("/sessions/{session_id}/repairs/{candidate_id}")
    async def post_repair(session_id: str, candidate_id: str, request: Request):
        s = get_session(session_id)
        body = await request.body()
        payload = json.loads(body) if body else {}
        with s.lock:
            changed = s.apply_repair(candidate_id, payload.get("input"))
            return {"changedValues": changed, "report": s.report.to_json(),
                    "structure": model_to_json(s.model)}

    @app.post("/sessions/{session_id}/refactorings")
    async def post_refactoring(session_id: str, request: Request):
        s = get_session(session_id)
        payload = await request.json()
        op = payload.get("op", "")
        params = payload.get("params", {})
        dry_run = payload.get("dryRun", True)
        with s.lock:
            plan = s.build_plan(op, params)
            response = {"plan": plan.to_json()}
            if not dry_run:
                changed = s.apply_plan(plan)
                response["changedValues"] = changed
                response["report"] = s.report.to_json()
                response["structure"] = model_to_json(s.model)
            return response

    @app.post("/sessions/{session_id}/undo")
    async def post_undo(session_id: str):
        s = get_session(session_id)
        with s.lock:
            changed = s.undo()
            return {"changedValues": changed, "report": s.report.to_json()}

    @app.put("/sessions/{session_id}/settings")
    async def put_settings(session_id: str, request: Request):
        s = get_session(session_id)
        payload = await request.json()
        with s.lock:
            if "soundnessEnabled" in payload:
                s.set_soundness(bool(payload["soundnessEnabled"]))
            return {"soundnessEnabled": s.soundness_enabled}

    @app.put("/sessions/{session_id}/save")
    async def put_save(session_id: str, request: Request):
        s = get_session(session_id)
        payload = await request.json()
        path = pathlib.Path(payload["path"])
        with s.lock:
            path.write_bytes(save_json(s.wb))
            return {"saved": str(path)}

    return app


def run(port: int = DEFAULT_PORT):
    import os

    import uvicorn
    uvicorn.run(create_app(), host="127.0.0.1",
                port=int(os.environ.get("PORT", port)))

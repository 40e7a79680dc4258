"""HTTP+JSON API over the curation store, plus static files for the UI."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .curation import DECISIONS, CurationStore
from .errors import NotLoaded, RevisionConflict, UnknownPair, UnknownTarget


class DecisionBody(BaseModel):
    candidate: str
    decision: str
    expected_revision: int


def create_app(store: CurationStore, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="synrank curation", docs_url=None, redoc_url=None)

    def error(status: int, detail: str) -> JSONResponse:
        # every response, errors included, reports the store revision
        return JSONResponse(status_code=status, content={"detail": detail, "revision": store.revision})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "revision": store.revision}

    @app.get("/api/targets")
    def targets():
        try:
            rows = store.list_targets()
        except NotLoaded as exc:
            return error(503, str(exc))
        return {
            "revision": store.revision,
            "targets": [{"target": t, "total": total, "pending": pending} for t, total, pending in rows],
        }

    @app.get("/api/targets/{target}/candidates")
    def candidates(target: str, offset: int = Query(0, ge=0), limit: int = Query(50, ge=0, le=500)):
        try:
            total, rows = store.get_ranking(target, offset, limit)
        except UnknownTarget as exc:
            return error(404, str(exc))
        except NotLoaded as exc:
            return error(503, str(exc))
        return {
            "revision": store.revision,
            "target": target,
            "total": total,
            "offset": offset,
            "rows": [
                {"candidate": c, "score": s, "rank": r, "decision": d} for c, s, r, d in rows
            ],
        }

    @app.post("/api/targets/{target}/decisions")
    def decide(target: str, body: DecisionBody):
        if body.decision not in DECISIONS:
            return error(422, f"decision must be one of {DECISIONS}")
        try:
            revision = store.record_decision(target, body.candidate, body.decision, body.expected_revision)
        except UnknownPair as exc:
            return error(404, str(exc))
        except RevisionConflict as exc:
            return error(409, str(exc))
        return {"revision": revision}

    @app.get("/api/export")
    def export(format: str = "tsv"):
        if format != "tsv":
            return error(422, "only format=tsv is supported")
        return PlainTextResponse(
            store.export_thesaurus(),
            media_type="text/tab-separated-values; charset=utf-8",
            headers={
                "Content-Disposition": 'attachment; filename="thesaurus.tsv"',
                "X-Revision": str(store.revision),
            },
        )

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

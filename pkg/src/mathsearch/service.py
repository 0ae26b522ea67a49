"""HTTP JSON API over one immutable index snapshot.

Read-only by design: rebuild the index with the CLI and restart to swap.
All handlers share the snapshot without locks; no request mutates state.

Endpoints (see docs/api.md for schemas):
  GET /api/search?q=...&limit=...   ranked results with highlights
  GET /api/doc/{doc_id}             stored document
  GET /healthz                      readiness and document count
"""
from __future__ import annotations

from fastapi import FastAPI, Query as QueryParam
from fastapi.responses import JSONResponse

from .formula import render
from .index import Index
from .search import EmptyQuery, FormulaError, QuerySyntaxError, to_response

MAX_LIMIT = 500
DEFAULT_LIMIT = 50


def create_app(index: Index | None = None, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="mathsearch", docs_url=None, redoc_url=None)
    app.state.index = index

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=[cors_origin], allow_methods=["GET"])

    def _index_or_none() -> Index | None:
        return app.state.index

    @app.get("/healthz")
    def healthz():
        index = _index_or_none()
        if index is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        return {"status": "ok", "n_docs": index.n_docs}

    @app.get("/api/search")
    def api_search(q: str = QueryParam(default=""), limit: int = QueryParam(default=DEFAULT_LIMIT)):
        index = _index_or_none()
        if index is None:
            return JSONResponse({"error": "index is loading"}, status_code=503)
        limit = max(1, min(limit, MAX_LIMIT))
        try:
            return to_response(index, q, limit)
        except QuerySyntaxError as exc:
            return JSONResponse({"error": str(exc), "position": exc.position}, status_code=400)
        except EmptyQuery as exc:
            return JSONResponse({"error": str(exc), "position": None}, status_code=400)
        except FormulaError as exc:
            return JSONResponse(
                {"error": str(exc), "position": getattr(exc.cause, "position", None)},
                status_code=400,
            )

    @app.get("/api/doc/{doc_id:path}")
    def api_doc(doc_id: str):
        index = _index_or_none()
        if index is None:
            return JSONResponse({"error": "index is loading"}, status_code=503)
        doc = index.get(doc_id)
        if doc is None:
            return JSONResponse({"error": f"unknown document {doc_id!r}"}, status_code=404)
        return {
            "doc_id": doc.doc_id,
            "title": doc.title,
            "text": doc.text,
            "formulae": [render(f) for f in doc.formulae],
        }

    return app

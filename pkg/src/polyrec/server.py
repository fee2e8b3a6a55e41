"""Read-only HTTP query service over a records snapshot.

Every endpoint is a thin view of RecordStore operations on an immutable
snapshot loaded at startup (POST /admin/reload re-reads the file and swaps
the snapshot atomically). Errors use the ``{"error", "detail"}`` envelope;
CORS is open so the browser explorer can call the API directly.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .pipeline import load_corpus
from .records import CompositionClass, record_to_json
from .store import (
    SCOPE_SAME_DOCUMENT,
    SCOPE_SAME_RECORD_MATERIALS,
    QueryFilter,
    RecordStore,
    UnknownProperty,
)
from .values import load_registry


def _load_store(records_path, corpus_path, units_path) -> RecordStore:
    registry = load_registry(units_path) if units_path else None
    doc_texts = None
    if corpus_path:
        doc_texts = {doc.doc_id: doc.text for doc in load_corpus(corpus_path)}
    return RecordStore.from_file(records_path, registry=registry, doc_texts=doc_texts)


def create_app(
    records_path: str,
    corpus_path: Optional[str] = None,
    units_path: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="polyrec", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    state = {"store": _load_store(records_path, corpus_path, units_path)}
    lock = threading.Lock()

    def store() -> RecordStore:
        return state["store"]

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "invalid_parameters", "detail": str(exc.errors())},
        )

    @app.exception_handler(HTTPException)
    async def http_handler(request: Request, exc: HTTPException):
        detail = exc.detail
        error = "not_found" if exc.status_code == 404 else "bad_request"
        if isinstance(detail, dict) and "error" in detail:
            error, detail = detail["error"], detail.get("detail", "")
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": error, "detail": detail},
        )

    def parse_filter(
        property: Optional[str],
        material: Optional[str],
        min_value: Optional[float],
        max_value: Optional[float],
        year_min: Optional[int],
        year_max: Optional[int],
        composition: Optional[str],
        keyword: Optional[str],
    ) -> QueryFilter:
        comp = None
        if composition:
            try:
                comp = CompositionClass(composition.upper())
            except ValueError:
                raise HTTPException(
                    400, f"unknown composition class: {composition!r}"
                )
        value_range = None
        if min_value is not None or max_value is not None:
            lo = min_value if min_value is not None else float("-inf")
            hi = max_value if max_value is not None else float("inf")
            if lo > hi:
                raise HTTPException(400, f"malformed value range: {lo} > {hi}")
            value_range = (lo, hi)
        year_range = None
        if year_min is not None or year_max is not None:
            if year_min is not None and year_max is not None and year_min > year_max:
                raise HTTPException(
                    400, f"malformed year range: {year_min} > {year_max}"
                )
            year_range = (year_min, year_max)
        if property is not None and not store().knows_property(property):
            raise HTTPException(404, f"unknown property: {property!r}")
        return QueryFilter(
            property=property,
            material=material,
            value_range=value_range,
            year_range=year_range,
            composition_class=comp,
            keyword=keyword,
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "records": len(store())}

    @app.get("/records")
    def records(
        property: Optional[str] = None,
        material: Optional[str] = None,
        min: Optional[float] = None,
        max: Optional[float] = None,
        year_min: Optional[int] = None,
        year_max: Optional[int] = None,
        composition: Optional[str] = None,
        keyword: Optional[str] = None,
        page: int = Query(default=1),
        page_size: int = Query(default=50),
    ):
        flt = parse_filter(
            property, material, min, max, year_min, year_max, composition, keyword
        )
        try:
            result = store().query(flt, page=page, page_size=page_size)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return {
            "records": [record_to_json(r) for r in result.records],
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
        }

    @app.get("/properties")
    def properties(min_count: int = 0):
        histogram = store().property_histogram(min_count=min_count)
        return {
            "properties": [
                {"name": name, "count": count} for name, count in histogram.items()
            ]
        }

    @app.get("/stats")
    def stats(
        property: Optional[str] = None,
        material: Optional[str] = None,
        composition: Optional[str] = None,
        keyword: Optional[str] = None,
    ):
        flt = parse_filter(
            property, material, None, None, None, None, composition, keyword
        )
        st = store()
        matching = st.filtered(flt)
        return {
            "total": len(matching),
            "composition": st.composition_counts(matching),
            "unique_neat_polymers": st.count_unique_polymers(matching),
            "yearly_counts": {str(k): v for k, v in st.yearly_counts(flt).items()},
        }

    @app.get("/scatter")
    def scatter(
        x: str,
        y: str,
        scope: str = SCOPE_SAME_RECORD_MATERIALS,
    ):
        if scope not in (SCOPE_SAME_RECORD_MATERIALS, SCOPE_SAME_DOCUMENT):
            raise HTTPException(400, f"unknown scope: {scope!r}")
        st = store()
        try:
            pairs = st.scatter_pairs(x, y, scope)
        except UnknownProperty as exc:
            raise HTTPException(404, f"unknown property: {exc.args[0]!r}")
        def unit_of(name):
            spec = st.registry.lookup(name)
            return spec.canonical_unit if spec else None
        return {
            "pairs": [
                {"x": px, "y": py, "doc_id": doc_id, "year": year}
                for px, py, doc_id, year in pairs
            ],
            "x_unit": unit_of(x),
            "y_unit": unit_of(y),
        }

    @app.post("/admin/reload")
    def reload_snapshot():
        with lock:
            state["store"] = _load_store(records_path, corpus_path, units_path)
        return {"status": "reloaded", "records": len(store())}

    return app

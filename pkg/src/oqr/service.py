"""HTTP facade: guidance, translation, execution and the concept store.

All bodies are JSON with stable field names (documented in the README).
Errors carry machine-readable codes mirroring the module error taxonomies so
the wizard can render precise guidance. Ontology and mappings are immutable
at runtime; concept mutations are serialized by a lock.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import dlq
from .errors import OqrError, UnknownConcept, UnknownReference
from .names import canon
from .session import Workspace

_BAD_REQUEST = 400
_NOT_FOUND = 404
_CONFLICT = 409


def _error_payload(exc: OqrError) -> dict:
    payload: dict = {"code": exc.code, "message": str(exc)}
    for attr in ("position", "line"):
        value = getattr(exc, attr, None)
        if value is not None:
            payload[attr] = value
    suggestions = getattr(exc, "suggestions", None)
    if suggestions is not None:
        payload["suggestions"] = list(suggestions)
    return payload


def _fail(status: int, exc: OqrError) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": _error_payload(exc)})


class TranslateRequest(BaseModel):
    expr: str | None = None
    concept: str | None = None
    conceptText: str | None = None


class ExecuteRequest(BaseModel):
    expr: str | None = None
    concept: str | None = None
    conceptText: str | None = None
    keysOnly: bool = False


class SaveConceptRequest(BaseModel):
    name: str | None = None
    text: str | None = None
    assertions: list[str] | None = None
    overwrite: bool = False


def _rowset_json(rows, kind: str) -> dict:
    return {
        "kind": kind,
        "header": list(rows.header),
        "rows": [["" if v is None else v for v in row] for row in rows.rows],
    }


def create_app(workspace: Workspace, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="oqr", docs_url=None, redoc_url=None)
    store_lock = threading.Lock()

    @app.exception_handler(OqrError)
    async def oqr_error_handler(request: Request, exc: OqrError):
        if isinstance(exc, UnknownConcept):
            return _fail(_NOT_FOUND, exc)
        return _fail(_BAD_REQUEST, exc)

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/classes")
    def classes(parent: str | None = None):
        try:
            return {"classes": workspace.class_level(parent)}
        except UnknownReference as exc:
            return _fail(_NOT_FOUND, exc)

    @app.get("/api/classes/{name}/properties")
    def class_properties(name: str):
        try:
            return {"class": canon(name), "properties": workspace.class_properties(name)}
        except UnknownReference as exc:
            return _fail(_NOT_FOUND, exc)

    @app.get("/api/properties/{name}/values")
    def property_values(name: str):
        try:
            return {"property": canon(name), "values": workspace.property_values(name)}
        except UnknownReference as exc:
            return _fail(_NOT_FOUND, exc)

    @app.post("/api/translate")
    def translate(body: TranslateRequest):
        response = workspace.translate(expr=body.expr, concept=body.concept,
                                       concept_text=body.conceptText)
        return {
            "dl_text": response.dl_text,
            "ra_text": response.ra_text,
            "sql": response.sql,
            "warnings": list(response.warnings),
        }

    @app.post("/api/execute")
    def execute(body: ExecuteRequest):
        response, rows, kind = workspace.execute(
            expr=body.expr, concept=body.concept, concept_text=body.conceptText,
            keys_only=body.keysOnly,
        )
        payload = _rowset_json(rows, kind)
        payload["sql"] = response.sql
        payload["warnings"] = list(response.warnings)
        return payload

    @app.get("/api/concepts")
    def list_concepts():
        store = _require_store()
        out = []
        for name in store.list():
            entry = store.get(name)
            out.append({"name": entry.name, "created": entry.created,
                        "modified": entry.modified})
        return {"concepts": out}

    @app.get("/api/concepts/{name}")
    def show_concept(name: str):
        store = _require_store()
        entry = store.get(name)
        return {
            "name": entry.name,
            "text": entry.text,
            "created": entry.created,
            "modified": entry.modified,
            "assertions": [dlq.format_expression(a) for a in entry.definition.assertions],
        }

    @app.post("/api/concepts")
    def save_concept(body: SaveConceptRequest):
        store = _require_store()
        definition = _definition_from(body)
        with store_lock:
            existed = definition.name in store
            if existed and not body.overwrite:
                return JSONResponse(status_code=_CONFLICT, content={"error": {
                    "code": "concept_exists",
                    "message": f"concept {definition.name} already exists; "
                               "set overwrite to replace it",
                }})
            entry = store.save(definition, workspace.reg)
        return JSONResponse(
            status_code=200 if existed else 201,
            content={"name": entry.name, "text": entry.text,
                     "created": entry.created, "modified": entry.modified},
        )

    @app.delete("/api/concepts/{name}")
    def delete_concept(name: str):
        store = _require_store()
        with store_lock:
            store.delete(name)
        return {"deleted": canon(name)}

    def _require_store():
        if workspace.store is None:
            raise OqrError("no concept store configured")
        return workspace.store

    def _definition_from(body: SaveConceptRequest) -> dlq.ConceptDefinition:
        if body.text is not None:
            definition = dlq.parse_concept(body.text, workspace.ont)
            if body.name is not None and canon(body.name) != definition.name:
                raise OqrError(
                    f"body name {canon(body.name)} does not match block name {definition.name}"
                )
            return definition
        if body.name is None or not body.assertions:
            raise OqrError("provide either a concept block text, or a name with assertions")
        parsed = tuple(dlq.parse_expression(a, workspace.ont) for a in body.assertions)
        return dlq.ConceptDefinition(canon(body.name), parsed)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="wizard")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>oqr service</h1>"
                "<p>No wizard assets configured (start with --static). "
                "API lives under <code>/api</code>; see the README for the schema.</p>"
                "</body></html>"
            )

    return app

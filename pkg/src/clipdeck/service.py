"""HTTP/JSON surface and the mutation dispatcher behind it.

Writes go through optimistic concurrency: the client sends the revision it
last saw, and the envelope is applied only if that still matches, all under
the project's lock. Validation failures map to 400, unknown ids to 404, and
revision conflicts to 409 with the current revision in the body.
"""

from __future__ import annotations

import base64
import binascii
from typing import Any, Callable

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import capture as capture_mod
from . import stats as stats_mod
from . import views
from .canonical import sha256_hex
from .capture import BoundingBox, CaptureContext, LayoutNode, TextRecognizer
from .errors import (
    ClipdeckError,
    EmptyPayload,
    EmptySelection,
    EmptyTabList,
    EngineFailure,
    MissingAsset,
    NotFound,
    RevisionConflict,
    SchemaInvalid,
    UnknownOp,
)
from .store import CardStore


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return _is_int(value) or isinstance(value, float)


def _decode_b64(text: Any, label: str) -> bytes:
    if not isinstance(text, str):
        raise SchemaInvalid(f"{label} must be base64 text")
    try:
        return base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise SchemaInvalid(f"{label} is not valid base64") from exc


def _check_keys(body: dict, allowed: set[str], label: str) -> None:
    unknown = set(body) - allowed
    if unknown:
        raise SchemaInvalid(f"unknown {label} field(s): {', '.join(sorted(unknown))}")


def _get_opt_str(body: dict, key: str) -> str | None:
    value = body.get(key)
    if value is not None and not isinstance(value, str):
        raise SchemaInvalid(f"{key} must be text")
    return value


def _get_opt_int(body: dict, key: str) -> int | None:
    value = body.get(key)
    if value is not None and not _is_int(value):
        raise SchemaInvalid(f"{key} must be an integer")
    return value


def _get_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str):
        raise SchemaInvalid(f"{key} must be text")
    return value


class ClipdeckService:
    """Store plus capture pipelines behind one mutation entry point."""

    def __init__(
        self,
        store: CardStore | None = None,
        recognizer: TextRecognizer | None = None,
    ) -> None:
        self.store = store if store is not None else CardStore()
        self.recognizer = recognizer

    # ------------------------------------------------------------- mutations

    def apply_mutation(self, project_id: str, envelope: dict) -> tuple[int, dict]:
        """Apply one envelope if its expected revision is still current."""
        if not isinstance(envelope, dict):
            raise SchemaInvalid("mutation envelope must be an object")
        _check_keys(envelope, {"expected_revision", "op", "args"}, "envelope")
        expected = envelope.get("expected_revision")
        if not _is_int(expected) or expected < 0:
            raise SchemaInvalid("expected_revision must be a non-negative integer")
        op = envelope.get("op")
        if not isinstance(op, str):
            raise SchemaInvalid("op must be text")
        args = envelope.get("args", {})
        if not isinstance(args, dict):
            raise SchemaInvalid("args must be an object")
        handler = _MUTATION_OPS.get(op)
        if handler is None:
            raise UnknownOp(f"unknown operation {op!r}")
        with self.store.project_lock(project_id):
            current = self.store.revision(project_id)
            if expected != current:
                raise RevisionConflict(current)
            result = handler(self, project_id, args)
            return self.store.revision(project_id), result

    def _op_create_card(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"kind", "title", "parent_id", "position"}, "create_card")
        card = self.store.create_card(
            project_id,
            _get_str(args, "kind"),
            _get_str(args, "title"),
            parent_id=_get_opt_str(args, "parent_id"),
            position=_get_opt_int(args, "position"),
        )
        return {"card": card.to_dict()}

    def _op_move_card(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id", "parent_id", "position"}, "move_card")
        position = args.get("position")
        if not _is_int(position):
            raise SchemaInvalid("position must be an integer")
        card = self.store.move_card(
            project_id,
            _get_str(args, "card_id"),
            _get_opt_str(args, "parent_id"),
            position,
        )
        return {"card": card.to_dict()}

    def _op_reorder_card(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id", "position"}, "reorder_card")
        position = args.get("position")
        if not _is_int(position):
            raise SchemaInvalid("position must be an integer")
        card = self.store.reorder_card(project_id, _get_str(args, "card_id"), position)
        return {"card": card.to_dict()}

    def _op_set_annotation(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id", "text"}, "set_annotation")
        card = self.store.set_annotation(
            project_id, _get_str(args, "card_id"), _get_str(args, "text")
        )
        return {"card": card.to_dict()}

    def _op_set_color(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id", "color"}, "set_color")
        card = self.store.set_color(
            project_id, _get_str(args, "card_id"), _get_opt_str(args, "color")
        )
        return {"card": card.to_dict()}

    def _op_set_collapsed(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id", "flag"}, "set_collapsed")
        flag = args.get("flag")
        if not isinstance(flag, bool):
            raise SchemaInvalid("flag must be boolean")
        card = self.store.set_collapsed(project_id, _get_str(args, "card_id"), flag)
        return {"card": card.to_dict()}

    def _op_set_project_pinned(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"pinned"}, "set_project_pinned")
        pinned = args.get("pinned")
        if not isinstance(pinned, bool):
            raise SchemaInvalid("pinned must be boolean")
        project = self.store.set_project_pinned(project_id, pinned)
        return {"project": project.to_dict(with_revision=True)}

    def _op_delete_card(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id"}, "delete_card")
        removed = self.store.delete_card(project_id, _get_str(args, "card_id"))
        return {"removed": removed}

    def _op_attach_recognized_text(self, project_id: str, args: dict) -> dict:
        _check_keys(args, {"card_id"}, "attach_recognized_text")
        card_id = _get_str(args, "card_id")
        self.store.require_card(project_id, card_id)
        if self.recognizer is None:
            raise EngineFailure("no text recognition engine is configured")
        card = capture_mod.attach_recognized_text(self.store, card_id, self.recognizer)
        return {"card": card.to_dict()}

    # -------------------------------------------------------------- captures

    def capture(self, project_id: str, kind: str, body: dict) -> dict:
        if not isinstance(body, dict):
            raise SchemaInvalid("capture payload must be an object")
        declared = body.get("kind")
        if declared is not None and declared != kind:
            raise SchemaInvalid(f"payload kind {declared!r} does not match route {kind!r}")
        handler = _CAPTURE_KINDS.get(kind)
        if handler is None:
            raise NotFound(f"unknown capture kind {kind!r}")
        return handler(self, project_id, body)

    def _capture_common(self, body: dict) -> tuple[CaptureContext, str | None, int | None]:
        ctx = _parse_ctx(body.get("ctx"))
        return ctx, _get_opt_str(body, "parent_id"), _get_opt_int(body, "position")

    def _capture_text(self, project_id: str, body: dict) -> dict:
        _check_keys(
            body,
            {"kind", "ctx", "selection_text", "bytes_b64", "parent_id", "position"},
            "capture",
        )
        ctx, parent_id, position = self._capture_common(body)
        selection = body.get("selection_text")
        if selection is None and "bytes_b64" in body:
            raw = _decode_b64(body["bytes_b64"], "bytes_b64")
            try:
                selection = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise SchemaInvalid("selection bytes are not valid UTF-8") from exc
        if selection is None:
            raise EmptySelection("no selection text supplied")
        if not isinstance(selection, str):
            raise SchemaInvalid("selection_text must be text")
        card = capture_mod.capture_text(
            self.store, project_id, selection, ctx, parent_id, position
        )
        return {"card": card.to_dict(), "revision": self.store.revision(project_id)}

    def _capture_image(self, project_id: str, body: dict) -> dict:
        _check_keys(
            body,
            {"kind", "ctx", "bytes_b64", "media_type", "parent_id", "position"},
            "capture",
        )
        ctx, parent_id, position = self._capture_common(body)
        data = _decode_b64(body["bytes_b64"], "bytes_b64") if "bytes_b64" in body else b""
        if not data:
            raise EmptyPayload("image bytes are empty")
        media_type = body.get("media_type", "image/png")
        if not isinstance(media_type, str):
            raise SchemaInvalid("media_type must be text")
        card = capture_mod.capture_image(
            self.store, project_id, data, media_type, ctx, parent_id, position
        )
        return {"card": card.to_dict(), "revision": self.store.revision(project_id)}

    def _capture_bookmark(self, project_id: str, body: dict) -> dict:
        _check_keys(body, {"kind", "ctx", "bytes_b64", "parent_id", "position"}, "capture")
        ctx, parent_id, position = self._capture_common(body)
        archive = _decode_b64(body["bytes_b64"], "bytes_b64") if "bytes_b64" in body else None
        card = capture_mod.capture_bookmark(
            self.store, project_id, ctx, archive, parent_id, position
        )
        return {"card": card.to_dict(), "revision": self.store.revision(project_id)}

    def _capture_region(self, project_id: str, body: dict) -> dict:
        _check_keys(
            body,
            {"kind", "ctx", "bbox", "nodes", "bytes_b64", "parent_id", "position"},
            "capture",
        )
        ctx, parent_id, position = self._capture_common(body)
        data = _decode_b64(body["bytes_b64"], "bytes_b64") if "bytes_b64" in body else b""
        bbox = _parse_bbox(body.get("bbox"))
        nodes = _parse_nodes(body.get("nodes", []))
        card = capture_mod.capture_region(
            self.store, project_id, nodes, bbox, data, ctx, parent_id, position
        )
        return {"card": card.to_dict(), "revision": self.store.revision(project_id)}

    def _capture_tabs(self, project_id: str, body: dict) -> dict:
        _check_keys(body, {"kind", "tabs"}, "capture")
        tabs = body.get("tabs")
        if tabs is None:
            raise EmptyTabList("no tabs to import")
        if not isinstance(tabs, list):
            raise SchemaInvalid("tabs must be a list")
        contexts = [_parse_ctx(entry) for entry in tabs]
        result = capture_mod.import_tabs(self.store, project_id, contexts)
        return {
            "cards": [card.to_dict() for card in result.cards],
            "skipped": result.skipped,
            "revision": self.store.revision(project_id),
        }


_MUTATION_OPS: dict[str, Callable[[ClipdeckService, str, dict], dict]] = {
    "create_card": ClipdeckService._op_create_card,
    "move_card": ClipdeckService._op_move_card,
    "reorder_card": ClipdeckService._op_reorder_card,
    "set_annotation": ClipdeckService._op_set_annotation,
    "set_color": ClipdeckService._op_set_color,
    "set_collapsed": ClipdeckService._op_set_collapsed,
    "set_project_pinned": ClipdeckService._op_set_project_pinned,
    "delete_card": ClipdeckService._op_delete_card,
    "attach_recognized_text": ClipdeckService._op_attach_recognized_text,
}

_CAPTURE_KINDS: dict[str, Callable[[ClipdeckService, str, dict], dict]] = {
    "text": ClipdeckService._capture_text,
    "image": ClipdeckService._capture_image,
    "bookmark": ClipdeckService._capture_bookmark,
    "region": ClipdeckService._capture_region,
    "tabs": ClipdeckService._capture_tabs,
}


def _parse_ctx(doc: Any) -> CaptureContext:
    if not isinstance(doc, dict):
        raise SchemaInvalid("ctx must be an object")
    _check_keys(doc, {"url", "title", "favicon_b64", "viewport_b64"}, "ctx")
    url = doc.get("url")
    if url is not None and not isinstance(url, str):
        raise SchemaInvalid("ctx.url must be text")
    title = doc.get("title", "")
    if not isinstance(title, str):
        raise SchemaInvalid("ctx.title must be text")
    favicon = _decode_b64(doc["favicon_b64"], "favicon_b64") if "favicon_b64" in doc else None
    viewport = (
        _decode_b64(doc["viewport_b64"], "viewport_b64") if "viewport_b64" in doc else None
    )
    return CaptureContext(
        source_url=url or "",
        page_title=title,
        favicon=favicon or None,
        viewport_screenshot=viewport or None,
    )


def _parse_bbox(doc: Any) -> BoundingBox:
    if not isinstance(doc, dict):
        raise SchemaInvalid("bbox must be an object")
    _check_keys(doc, {"x", "y", "width", "height"}, "bbox")
    values = {}
    for key in ("x", "y", "width", "height"):
        value = doc.get(key)
        if not _is_number(value):
            raise SchemaInvalid(f"bbox.{key} must be a number")
        values[key] = value
    return BoundingBox(**values).validate()


def _parse_nodes(doc: Any) -> list[LayoutNode]:
    if not isinstance(doc, list):
        raise SchemaInvalid("nodes must be a list")
    nodes = []
    for entry in doc:
        if not isinstance(entry, dict):
            raise SchemaInvalid("node must be an object")
        _check_keys(entry, {"id", "depth", "rect", "markup", "text"}, "node")
        node_id = entry.get("id")
        depth = entry.get("depth")
        rect = entry.get("rect")
        if not _is_int(node_id) or not _is_int(depth) or depth < 0:
            raise SchemaInvalid("node id and depth must be integers")
        if (
            not isinstance(rect, list)
            or len(rect) != 4
            or not all(_is_number(v) for v in rect)
            or rect[2] < 0
            or rect[3] < 0
        ):
            raise SchemaInvalid("node rect must be [x, y, width, height]")
        markup = entry.get("markup", "")
        text = entry.get("text", "")
        if not isinstance(markup, str) or not isinstance(text, str):
            raise SchemaInvalid("node markup and text must be text")
        nodes.append(
            LayoutNode(node_id=node_id, depth=depth, rect=tuple(rect), markup=markup, text=text)
        )
    return nodes


# ----------------------------------------------------------------------- app


def create_app(service: ClipdeckService | None = None) -> FastAPI:
    service = service if service is not None else ClipdeckService()
    app = FastAPI(title="clipdeck", docs_url=None, redoc_url=None)
    app.state.service = service
    store = service.store

    @app.exception_handler(ClipdeckError)
    def handle_domain_error(request: Request, exc: ClipdeckError) -> JSONResponse:
        body: dict = {"error": {"code": exc.code, "message": str(exc)}}
        if isinstance(exc, RevisionConflict):
            body["current_revision"] = exc.current_revision
        return JSONResponse(status_code=exc.http_status, content=body)

    @app.exception_handler(RequestValidationError)
    def handle_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "SchemaInvalid", "message": "malformed request body"}},
        )

    @app.post("/projects", status_code=201)
    def create_project(body: dict) -> dict:
        name = body.get("name")
        if not isinstance(name, str):
            raise SchemaInvalid("name must be text")
        project = store.create_project(name)
        return {"project": project.to_dict(with_revision=True)}

    @app.get("/projects")
    def list_projects() -> dict:
        return {
            "projects": [
                {
                    **project.to_dict(with_revision=True),
                    "card_count": store.card_count(project.id),
                }
                for project in store.list_projects()
            ]
        }

    @app.get("/projects/{project_id}/overview")
    def project_overview(project_id: str) -> dict:
        return {
            "project_id": project_id,
            "revision": store.revision(project_id),
            "overview": views.project_overview(store, project_id),
        }

    @app.get("/projects/{project_id}/reader")
    def reader_view(project_id: str, root: str | None = None) -> dict:
        return {
            "project_id": project_id,
            "revision": store.revision(project_id),
            "entries": views.flatten_reader_view(store, project_id, root),
        }

    @app.get("/cards/{card_id}/peek")
    def peek_card(card_id: str) -> dict:
        return {"card_id": card_id, "entries": views.peek(store, card_id)}

    @app.post("/projects/{project_id}/mutations")
    def post_mutation(project_id: str, body: dict) -> dict:
        revision, result = service.apply_mutation(project_id, body)
        return {"revision": revision, "result": result}

    @app.post("/projects/{project_id}/capture/{kind}", status_code=201)
    def post_capture(project_id: str, kind: str, body: dict) -> dict:
        store.require_project(project_id)
        return service.capture(project_id, kind, body)

    @app.get("/projects/{project_id}/export")
    def export_project(project_id: str) -> Response:
        data = store.export_bytes(project_id)
        return Response(
            content=data,
            media_type="application/json",
            headers={"ETag": f'"{sha256_hex(data)}"'},
        )

    @app.post("/projects/import", status_code=201)
    def import_project(body: dict) -> dict:
        project = store.import_project(body)
        return {
            "project": project.to_dict(with_revision=True),
            "card_count": store.card_count(project.id),
        }

    @app.post("/assets", status_code=201)
    async def put_asset(request: Request) -> dict:
        data = await request.body()
        if not data:
            raise EmptyPayload("asset body is empty")
        media_type = request.headers.get("content-type", "application/octet-stream")
        media_type = media_type.split(";", 1)[0].strip() or "application/octet-stream"
        digest = store.assets.put(data, media_type)
        record = store.assets.record(digest)
        return {
            "hash": digest,
            "media_type": record.media_type,
            "byte_length": record.byte_length,
        }

    @app.get("/assets/{digest}")
    def get_asset(digest: str) -> Response:
        try:
            data, record = store.assets.get(digest)
        except MissingAsset as exc:
            raise NotFound(str(exc)) from exc
        return Response(content=data, media_type=record.media_type)

    @app.get("/projects/{project_id}/stats")
    def project_stats(project_id: str) -> dict:
        return {
            "project_id": project_id,
            "revision": store.revision(project_id),
            "stats": stats_mod.project_stats(store, project_id).to_dict(),
        }

    @app.get("/corpus/report")
    def corpus_report() -> dict:
        per_project = [
            stats_mod.project_stats(store, project.id) for project in store.list_projects()
        ]
        return stats_mod.corpus_report(per_project).to_dict()

    return app

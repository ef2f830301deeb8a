"""Capture pipelines: text selections, images, bookmarks, region clips, tabs.

Each pipeline builds a card draft (representations plus provenance) and hands
it to the store for the journaled commit. The region resolver maps a drawn
bounding box to the best-matching layout node by intersection-over-union,
computed in exact rational arithmetic so ties and thresholds are stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Protocol
from urllib.parse import urlsplit

from .assets import IMAGE_MEDIA_TYPES
from .errors import (
    AlreadyHasText,
    EmptyPayload,
    EmptySelection,
    EmptyTabList,
    EngineFailure,
    MissingUrl,
    NoImage,
    SchemaInvalid,
    UnsupportedMediaType,
)
from .model import Card, CardDraft, CardKind, Provenance, Representation, ReprKind
from .store import CardStore

TITLE_LIMIT = 80
ELLIPSIS = "…"

#: A selection resolves to a node only when the best IoU reaches this floor.
RESOLUTION_THRESHOLD = Fraction(1, 10)

ARCHIVE_MEDIA_TYPE = "application/octet-stream"


@dataclass(frozen=True)
class BoundingBox:
    """A drawn selection rectangle in CSS pixels."""

    x: int | float
    y: int | float
    width: int | float
    height: int | float

    def validate(self) -> "BoundingBox":
        if self.width <= 0 or self.height <= 0:
            raise SchemaInvalid("bounding box needs positive width and height")
        return self


@dataclass(frozen=True)
class LayoutNode:
    """One candidate page element, serialized by the client."""

    node_id: int
    depth: int
    rect: tuple[int | float, int | float, int | float, int | float]
    markup: str
    text: str


@dataclass
class CaptureContext:
    """Source-page context shipped with every capture."""

    source_url: str
    page_title: str
    favicon: bytes | None = None
    viewport_screenshot: bytes | None = None
    captured_at: datetime | None = None
    favicon_media_type: str = "image/png"
    viewport_media_type: str = "image/png"


@dataclass
class TabImportResult:
    cards: list[Card] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)


class TextRecognizer(Protocol):
    """Pluggable engine that turns a stored image into selectable text."""

    def recognize(self, image_bytes: bytes, media_type: str) -> str: ...


# ------------------------------------------------------------------ resolver


def rect_iou(
    a: tuple[int | float, int | float, int | float, int | float],
    b: tuple[int | float, int | float, int | float, int | float],
) -> Fraction:
    """Intersection-over-union of two (x, y, width, height) rectangles."""
    ax, ay, aw, ah = (Fraction(v) for v in a)
    bx, by, bw, bh = (Fraction(v) for v in b)
    overlap_w = min(ax + aw, bx + bw) - max(ax, bx)
    overlap_h = min(ay + ah, by + bh) - max(ay, by)
    if overlap_w <= 0 or overlap_h <= 0:
        intersection = Fraction(0)
    else:
        intersection = overlap_w * overlap_h
    union = aw * ah + bw * bh - intersection
    if union == 0:
        return Fraction(1) if tuple(a) == tuple(b) else Fraction(0)
    return intersection / union


def resolve_region(nodes: list[LayoutNode], bbox: BoundingBox) -> LayoutNode | None:
    """Pick the node whose rect best matches the drawn box.

    The winner maximizes IoU; ties fall to the deeper node, then the smaller
    rect, then the earlier node in document order. Returns None when even the
    best candidate overlaps too little to call the resolution a match.
    """
    target = (bbox.x, bbox.y, bbox.width, bbox.height)
    best: LayoutNode | None = None
    best_key: tuple = ()
    for node in nodes:
        iou = rect_iou(node.rect, target)
        area = Fraction(node.rect[2]) * Fraction(node.rect[3])
        key = (iou, node.depth, -area, -node.node_id)
        if best is None or key > best_key:
            best = node
            best_key = key
    if best is None or best_key[0] < RESOLUTION_THRESHOLD:
        return None
    return best


# ----------------------------------------------------------------- pipelines


def _absolute_url(url: str | None) -> str:
    if not url or not url.strip():
        raise MissingUrl("capture context has no source url")
    parts = urlsplit(url)
    if not parts.scheme or not (parts.netloc or parts.scheme == "file"):
        raise MissingUrl(f"source url must be absolute: {url!r}")
    return url


def _provenance(store: CardStore, ctx: CaptureContext, *, viewport: bool) -> Provenance:
    url = _absolute_url(ctx.source_url)
    favicon_ref = None
    if ctx.favicon:
        favicon_ref = store.assets.put(ctx.favicon, ctx.favicon_media_type)
    viewport_ref = None
    if viewport and ctx.viewport_screenshot:
        viewport_ref = store.assets.put(ctx.viewport_screenshot, ctx.viewport_media_type)
    return Provenance(
        source_url=url,
        page_title=ctx.page_title,
        favicon=favicon_ref,
        viewport_screenshot=viewport_ref,
        captured_at=ctx.captured_at,
    )


def _default_title(selection: str) -> str:
    base = selection.strip()
    if len(base) > TITLE_LIMIT:
        return base[:TITLE_LIMIT] + ELLIPSIS
    return base


def capture_text(
    store: CardStore,
    project_id: str,
    selection_text: str,
    ctx: CaptureContext,
    parent_id: str | None = None,
    position: int | None = None,
) -> Card:
    """Clip a text selection into a snippet card."""
    if not isinstance(selection_text, str) or not selection_text.strip():
        raise EmptySelection("selection is empty")
    draft = CardDraft(
        kind=CardKind.TEXT_SNIPPET,
        title=_default_title(selection_text),
        representations=[Representation(ReprKind.EXTRACTED_TEXT, text=selection_text)],
        provenance=_provenance(store, ctx, viewport=False),
    )
    return store.commit_capture(project_id, draft, "capture_text", parent_id, position)


def capture_image(
    store: CardStore,
    project_id: str,
    image_bytes: bytes,
    media_type: str,
    ctx: CaptureContext,
    parent_id: str | None = None,
    position: int | None = None,
) -> Card:
    """Clip a page image into an image card."""
    if not image_bytes:
        raise EmptyPayload("image bytes are empty")
    if media_type not in IMAGE_MEDIA_TYPES:
        raise UnsupportedMediaType(f"unsupported image media type {media_type!r}")
    asset = store.assets.put(image_bytes, media_type)
    draft = CardDraft(
        kind=CardKind.IMAGE,
        title=ctx.page_title,
        representations=[Representation(ReprKind.REGION_IMAGE, asset=asset)],
        provenance=_provenance(store, ctx, viewport=False),
    )
    return store.commit_capture(project_id, draft, "capture_image", parent_id, position)


def _bookmark_draft(store: CardStore, ctx: CaptureContext, page_archive: bytes | None) -> CardDraft:
    provenance = _provenance(store, ctx, viewport=True)
    representations = []
    if page_archive:
        archive_ref = store.assets.put(page_archive, ARCHIVE_MEDIA_TYPE)
        representations.append(Representation(ReprKind.PAGE_ARCHIVE, asset=archive_ref))
    return CardDraft(
        kind=CardKind.BOOKMARK,
        title=ctx.page_title,
        representations=representations,
        provenance=provenance,
    )


def capture_bookmark(
    store: CardStore,
    project_id: str,
    ctx: CaptureContext,
    page_archive: bytes | None = None,
    parent_id: str | None = None,
    position: int | None = None,
) -> Card:
    """Save the page itself: archive, title, url, viewport header."""
    draft = _bookmark_draft(store, ctx, page_archive)
    return store.commit_capture(project_id, draft, "capture_bookmark", parent_id, position)


def capture_region(
    store: CardStore,
    project_id: str,
    nodes: list[LayoutNode],
    bbox: BoundingBox,
    region_screenshot_bytes: bytes,
    ctx: CaptureContext,
    parent_id: str | None = None,
    position: int | None = None,
    screenshot_media_type: str = "image/png",
) -> Card:
    """Clip a drawn region: screenshot always, markup and text when resolved."""
    if not region_screenshot_bytes:
        raise EmptyPayload("region screenshot bytes are empty")
    bbox.validate()
    asset = store.assets.put(region_screenshot_bytes, screenshot_media_type)
    representations = [Representation(ReprKind.REGION_IMAGE, asset=asset)]
    node = resolve_region(nodes, bbox)
    if node is not None:
        representations.append(Representation(ReprKind.HTML_FRAGMENT, text=node.markup))
        if node.text.strip():
            representations.append(Representation(ReprKind.EXTRACTED_TEXT, text=node.text))
    draft = CardDraft(
        kind=CardKind.REGION_CLIP,
        title=ctx.page_title,
        representations=representations,
        provenance=_provenance(store, ctx, viewport=False),
    )
    return store.commit_capture(project_id, draft, "capture_region", parent_id, position)


def import_tabs(
    store: CardStore, project_id: str, tabs: list[CaptureContext]
) -> TabImportResult:
    """Bookmark every open tab in order; tabs without a url are reported."""
    if not tabs:
        raise EmptyTabList("no tabs to import")
    result = TabImportResult()
    drafts = []
    for index, ctx in enumerate(tabs):
        try:
            drafts.append(_bookmark_draft(store, ctx, None))
        except MissingUrl as exc:
            result.skipped.append({"index": index, "reason": str(exc)})
    if drafts:
        result.cards = store.commit_capture_batch(project_id, drafts, "capture_bookmark")
    return result


def attach_recognized_text(store: CardStore, card_id: str, engine: TextRecognizer) -> Card:
    """Run the recognizer over a card's region image and attach the output."""
    located = store.find_card(card_id)
    with store.project_lock(located.project_id):
        card = store.require_card(located.project_id, card_id)
        image_rep = card.representation(ReprKind.REGION_IMAGE)
        if image_rep is None:
            raise NoImage("card has no region image to recognize")
        if card.representation(ReprKind.EXTRACTED_TEXT) is not None:
            raise AlreadyHasText("card already has extracted text")
        data, record = store.assets.get(image_rep.asset)
        try:
            text = engine.recognize(data, record.media_type)
        except Exception as exc:
            raise EngineFailure(f"text recognition failed: {exc}") from exc
        if not isinstance(text, str):
            raise EngineFailure("text recognition returned a non-text result")
        return store.attach_extracted_text(card.project_id, card.id, text)

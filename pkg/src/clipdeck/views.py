"""Read models for the sidebar: summaries, preview grids, peeks, reader view.

All functions are pure reads over the store at its current revision. Children
of folders are listed inline ("listing" mode); children of any other card are
bundled out of sight and surface only through counts, grids, and peeks.
"""

from __future__ import annotations

from urllib.parse import urlsplit

from .errors import UnknownCard
from .model import Card, CardKind, ReprKind
from .store import CardStore

EXCERPT_LIMIT = 140
PREVIEW_GRID_CAP = 9


def header_image(card: Card) -> str | None:
    """Asset shown at the top of a card: its clip image, or the viewport
    screenshot for bookmarks."""
    rep = card.representation(ReprKind.REGION_IMAGE)
    if rep is not None:
        return rep.asset
    if card.kind is CardKind.BOOKMARK and card.provenance is not None:
        return card.provenance.viewport_screenshot
    return None


def source_host(card: Card) -> str:
    if card.provenance is None:
        return ""
    host = urlsplit(card.provenance.source_url).netloc
    return host or card.provenance.source_url


def card_summary(store: CardStore, card: Card) -> dict:
    child_count = len(store.child_ids(card.project_id, card.id))
    return {
        "card_id": card.id,
        "kind": card.kind.value,
        "title": card.title,
        "header_image": header_image(card),
        "source_host": source_host(card),
        "annotation_excerpt": card.annotation[:EXCERPT_LIMIT],
        "child_count": child_count,
        "collapsed": card.collapsed,
        "color": card.color.value if card.color else None,
    }


def preview_grid_counts(child_count: int) -> dict:
    shown = min(child_count, PREVIEW_GRID_CAP)
    return {"squares_shown": shown, "overflow": child_count - shown}


def preview_grid(store: CardStore, card_id: str) -> dict:
    card = store.find_card(card_id)
    return preview_grid_counts(len(store.child_ids(card.project_id, card.id)))


def project_overview(store: CardStore, project_id: str) -> list[dict]:
    """The sidebar forest: folder children inline, bundled children hidden."""
    store.require_project(project_id)

    def build(card_id: str) -> dict:
        card = store.require_card(project_id, card_id)
        node = {
            "card": card_summary(store, card),
            "preview": preview_grid_counts(len(store.child_ids(project_id, card_id))),
            "children": [],
        }
        if card.kind is CardKind.FOLDER:
            node["children"] = [
                build(child_id) for child_id in store.child_ids(project_id, card_id)
            ]
        return node

    return [build(root_id) for root_id in store.child_ids(project_id, None)]


def _excerpt_text(card: Card) -> str:
    rep = card.representation(ReprKind.EXTRACTED_TEXT)
    if rep is not None and rep.text:
        return rep.text[:EXCERPT_LIMIT]
    if card.annotation:
        return card.annotation[:EXCERPT_LIMIT]
    return card.title[:EXCERPT_LIMIT]


def peek(store: CardStore, card_id: str) -> list[dict]:
    """Miniatures of a card's direct children, one entry per child."""
    card = store.find_card(card_id)
    entries = []
    for child_id in store.child_ids(card.project_id, card.id):
        child = store.require_card(card.project_id, child_id)
        image = header_image(child)
        entries.append(
            {
                "card_id": child.id,
                "image": image,
                "excerpt": None if image is not None else _excerpt_text(child),
                "title": child.title,
            }
        )
    return entries


def flatten_reader_view(
    store: CardStore, project_id: str, root_card_id: str | None = None
) -> list[dict]:
    """Depth-first flattening of a subtree (or the whole project).

    The root card itself appears at depth 0; project-level flattening puts
    every root card at depth 0.
    """
    store.require_project(project_id)
    if root_card_id is not None and root_card_id not in store.cards(project_id):
        raise UnknownCard(f"no card {root_card_id} in project {project_id}")
    if root_card_id is None:
        stack = [(cid, 0) for cid in reversed(store.child_ids(project_id, None))]
    else:
        stack = [(root_card_id, 0)]
    entries = []
    while stack:
        card_id, depth = stack.pop()
        card = store.require_card(project_id, card_id)
        entries.append({"depth": depth, "card": card.to_dict()})
        stack.extend(
            (child_id, depth + 1)
            for child_id in reversed(store.child_ids(project_id, card_id))
        )
    return entries

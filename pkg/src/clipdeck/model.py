"""Core data model: projects, cards, representations, provenance, journal events.

Cards are the universal unit. A card's containment display mode is never
stored: children of a FOLDER render as an inline listing, children of any
other kind render as a hidden bundle. The to_dict/from_dict pairs define the
record forms used in snapshots and journal payloads (cards there never carry
project_id; the project header owns it).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime

from .canonical import format_timestamp, parse_timestamp
from .errors import SchemaInvalid, UnknownColor


class CardKind(str, enum.Enum):
    TEXT_SNIPPET = "TEXT_SNIPPET"
    IMAGE = "IMAGE"
    REGION_CLIP = "REGION_CLIP"
    BOOKMARK = "BOOKMARK"
    MANUAL = "MANUAL"
    FOLDER = "FOLDER"


class ReprKind(str, enum.Enum):
    REGION_IMAGE = "REGION_IMAGE"
    HTML_FRAGMENT = "HTML_FRAGMENT"
    EXTRACTED_TEXT = "EXTRACTED_TEXT"
    PAGE_ARCHIVE = "PAGE_ARCHIVE"


#: Representation kinds stored as content-addressed assets (the rest inline text).
ASSET_BACKED_REPRS = frozenset({ReprKind.REGION_IMAGE, ReprKind.PAGE_ARCHIVE})

#: Kinds created by clipping content directly off the page; their provenance
#: never carries a viewport screenshot.
DIRECT_CLIP_KINDS = frozenset(
    {CardKind.TEXT_SNIPPET, CardKind.IMAGE, CardKind.REGION_CLIP}
)


class Color(str, enum.Enum):
    RED = "RED"
    ORANGE = "ORANGE"
    YELLOW = "YELLOW"
    GREEN = "GREEN"
    BLUE = "BLUE"
    PURPLE = "PURPLE"
    PINK = "PINK"
    GRAY = "GRAY"


def coerce_color(value: "Color | str | None") -> Color | None:
    if value is None or isinstance(value, Color):
        return value
    try:
        return Color(value)
    except ValueError:
        raise UnknownColor(f"unknown color {value!r}") from None


@dataclass
class Project:
    id: str
    name: str
    pinned: bool
    created_at: datetime
    revision: int = 0

    def to_dict(self, *, with_revision: bool = False) -> dict:
        doc = {
            "id": self.id,
            "name": self.name,
            "pinned": self.pinned,
            "created_at": format_timestamp(self.created_at),
        }
        if with_revision:
            doc["revision"] = self.revision
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Project":
        return cls(
            id=doc["id"],
            name=doc["name"],
            pinned=doc["pinned"],
            created_at=parse_timestamp(doc["created_at"]),
        )


@dataclass
class Representation:
    """One stored form of a card's content: an asset ref or inline text."""

    repr_kind: ReprKind
    asset: str | None = None
    text: str | None = None

    def __post_init__(self) -> None:
        if (self.asset is None) == (self.text is None):
            raise ValueError("representation needs exactly one of asset/text")
        if self.repr_kind in ASSET_BACKED_REPRS and self.asset is None:
            raise ValueError(f"{self.repr_kind.value} must reference an asset")
        if self.repr_kind not in ASSET_BACKED_REPRS and self.text is None:
            raise ValueError(f"{self.repr_kind.value} must carry inline text")

    def to_dict(self) -> dict:
        if self.asset is not None:
            return {"repr_kind": self.repr_kind.value, "asset": self.asset}
        return {"repr_kind": self.repr_kind.value, "text": self.text}

    @classmethod
    def from_dict(cls, doc: dict) -> "Representation":
        return cls(
            repr_kind=ReprKind(doc["repr_kind"]),
            asset=doc.get("asset"),
            text=doc.get("text"),
        )


@dataclass
class Provenance:
    """Automatically captured source context for a clipped card."""

    source_url: str
    page_title: str
    favicon: str | None = None
    viewport_screenshot: str | None = None
    captured_at: datetime | None = None

    def to_dict(self) -> dict:
        return {
            "source_url": self.source_url,
            "page_title": self.page_title,
            "favicon": self.favicon,
            "viewport_screenshot": self.viewport_screenshot,
            "captured_at": format_timestamp(self.captured_at),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Provenance":
        return cls(
            source_url=doc["source_url"],
            page_title=doc["page_title"],
            favicon=doc.get("favicon"),
            viewport_screenshot=doc.get("viewport_screenshot"),
            captured_at=parse_timestamp(doc["captured_at"]),
        )


@dataclass
class Card:
    id: str
    project_id: str
    parent_id: str | None
    kind: CardKind
    title: str
    annotation: str
    color: Color | None
    order_index: int
    collapsed: bool
    representations: list[Representation]
    provenance: Provenance | None
    created_at: datetime
    updated_at: datetime

    def representation(self, kind: ReprKind) -> Representation | None:
        for rep in self.representations:
            if rep.repr_kind is kind:
                return rep
        return None

    def asset_refs(self) -> list[str]:
        refs = [rep.asset for rep in self.representations if rep.asset is not None]
        if self.provenance is not None:
            if self.provenance.favicon is not None:
                refs.append(self.provenance.favicon)
            if self.provenance.viewport_screenshot is not None:
                refs.append(self.provenance.viewport_screenshot)
        return refs

    def to_dict(self) -> dict:
        """Snapshot/journal record form; project_id intentionally excluded."""
        return {
            "id": self.id,
            "parent_id": self.parent_id,
            "kind": self.kind.value,
            "title": self.title,
            "annotation": self.annotation,
            "color": self.color.value if self.color else None,
            "order_index": self.order_index,
            "collapsed": self.collapsed,
            "representations": [rep.to_dict() for rep in self.representations],
            "provenance": self.provenance.to_dict() if self.provenance else None,
            "created_at": format_timestamp(self.created_at),
            "updated_at": format_timestamp(self.updated_at),
        }

    @classmethod
    def from_dict(cls, doc: dict, project_id: str) -> "Card":
        reps = [Representation.from_dict(rep) for rep in doc["representations"]]
        reps.sort(key=lambda rep: rep.repr_kind.value)
        prov = doc.get("provenance")
        return cls(
            id=doc["id"],
            project_id=project_id,
            parent_id=doc.get("parent_id"),
            kind=CardKind(doc["kind"]),
            title=doc["title"],
            annotation=doc["annotation"],
            color=Color(doc["color"]) if doc.get("color") else None,
            order_index=doc["order_index"],
            collapsed=doc["collapsed"],
            representations=reps,
            provenance=Provenance.from_dict(prov) if prov else None,
            created_at=parse_timestamp(doc["created_at"]),
            updated_at=parse_timestamp(doc["updated_at"]),
        )


@dataclass
class CardDraft:
    """A card assembled by a capture pipeline, before it is committed.

    The store materializes the draft at commit time: it assigns the id,
    timestamps, and order index, and stamps provenance.captured_at when the
    capture context did not supply one.
    """

    kind: CardKind
    title: str
    representations: list[Representation] = field(default_factory=list)
    provenance: Provenance | None = None


@dataclass
class JournalEvent:
    """Append-only record of one committed mutation."""

    seq: int
    op_name: str
    payload: dict
    at: datetime

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "op_name": self.op_name,
            "payload": self.payload,
            "at": format_timestamp(self.at),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "JournalEvent":
        try:
            return cls(
                seq=doc["seq"],
                op_name=doc["op_name"],
                payload=doc["payload"],
                at=parse_timestamp(doc["at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaInvalid(f"malformed journal event: {exc}") from exc

"""The journaled card store.

Every mutation follows decide-then-apply: validate against live state, build
a journal event whose payload carries the fully materialized result (card
records, ids, timestamps), then run the shared applier for that op. Replay
feeds the same appliers from the same payloads, so a replayed store is
byte-identical to the live one by construction.

Journals are per project. A journal starts with a genesis region (the
project header, plus an import record when the project was created from a
snapshot) that is not sequence-counted; events are numbered 1..n and the
project revision always equals the event count.
"""

from __future__ import annotations

import threading
import uuid
from collections.abc import Callable, Iterable
from datetime import datetime, timezone

from .assets import AssetStore
from .canonical import canonical_json_bytes, parse_timestamp, sha256_hex
from .errors import (
    AlreadyHasText,
    CycleRejected,
    EmptyName,
    FolderInsideBundle,
    GapInSequence,
    InvariantViolation,
    MissingAsset,
    NoImage,
    PositionOutOfRange,
    SchemaInvalid,
    UnknownCard,
    UnknownOp,
    UnknownParent,
    UnknownProject,
)
from .model import (
    Card,
    CardDraft,
    CardKind,
    Color,
    JournalEvent,
    Project,
    Representation,
    ReprKind,
    coerce_color,
)

SNAPSHOT_FORMAT = "clipdeck-snapshot"
SNAPSHOT_VERSION = 1

#: Kinds a card can be given at manual creation; every other kind is minted
#: by a capture pipeline that supplies the required representations.
MANUAL_KINDS = frozenset({CardKind.MANUAL, CardKind.FOLDER})

Clock = Callable[[], datetime]
IdFactory = Callable[[], str]
Listener = Callable[[str, "list[dict]"], None]


def system_clock() -> datetime:
    return datetime.now(timezone.utc)


def random_id() -> str:
    return uuid.uuid4().hex


class CardStore:
    """In-memory model store with per-project journals and locks."""

    def __init__(
        self,
        assets: AssetStore | None = None,
        clock: Clock = system_clock,
        id_factory: IdFactory = random_id,
    ) -> None:
        self.assets = assets if assets is not None else AssetStore()
        self._clock = clock
        self._new_id = id_factory
        self._registry_lock = threading.RLock()
        self._projects: dict[str, Project] = {}
        self._cards: dict[str, dict[str, Card]] = {}
        self._children: dict[str, dict[str | None, list[str]]] = {}
        self._genesis: dict[str, list[dict]] = {}
        self._events: dict[str, list[JournalEvent]] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._card_location: dict[str, str] = {}
        self._listeners: list[Listener] = []

    # ---------------------------------------------------------------- wiring

    def subscribe(self, listener: Listener) -> None:
        """Register a callback for newly appended journal records."""
        self._listeners.append(listener)

    def project_lock(self, project_id: str) -> threading.RLock:
        self.require_project(project_id)
        return self._locks[project_id]

    def _notify(self, project_id: str, records: list[dict]) -> None:
        for listener in self._listeners:
            listener(project_id, records)

    # ---------------------------------------------------------------- reads

    def require_project(self, project_id: str) -> Project:
        project = self._projects.get(project_id)
        if project is None:
            raise UnknownProject(f"no project {project_id}")
        return project

    def list_projects(self) -> list[Project]:
        with self._registry_lock:
            return sorted(self._projects.values(), key=lambda p: (p.created_at, p.id))

    def revision(self, project_id: str) -> int:
        return self.require_project(project_id).revision

    def cards(self, project_id: str) -> dict[str, Card]:
        self.require_project(project_id)
        return self._cards[project_id]

    def card_count(self, project_id: str) -> int:
        return len(self.cards(project_id))

    def child_ids(self, project_id: str, parent_id: str | None) -> list[str]:
        self.require_project(project_id)
        return list(self._children[project_id].get(parent_id, ()))

    def require_card(self, project_id: str, card_id: str) -> Card:
        card = self.cards(project_id).get(card_id)
        if card is None:
            raise UnknownCard(f"no card {card_id} in project {project_id}")
        return card

    def find_card(self, card_id: str) -> Card:
        """Locate a card by id alone, searching all projects."""
        project_id = self._card_location.get(card_id)
        if project_id is not None:
            card = self._cards.get(project_id, {}).get(card_id)
            if card is not None:
                return card
        for cards in self._cards.values():
            card = cards.get(card_id)
            if card is not None:
                return card
        raise UnknownCard(f"no card {card_id}")

    def journal_records(self, project_id: str) -> list[dict]:
        """Genesis records followed by event records, in journal order."""
        self.require_project(project_id)
        with self._locks[project_id]:
            records = [dict(rec) for rec in self._genesis[project_id]]
            records.extend(
                {"type": "event", **event.to_dict()} for event in self._events[project_id]
            )
            return records

    # ------------------------------------------------------------- lifecycle

    def create_project(self, name: str) -> Project:
        if not name.strip():
            raise EmptyName("project name must be non-empty")
        at = self._clock()
        project = Project(id=self._new_id(), name=name, pinned=False, created_at=at)
        self._register_project(project)
        header = {"type": "project", "project": project.to_dict()}
        self._genesis[project.id].append(header)
        self._notify(project.id, [header])
        return project

    def _register_project(self, project: Project) -> None:
        with self._registry_lock:
            self._projects[project.id] = project
            self._cards[project.id] = {}
            self._children[project.id] = {}
            self._genesis[project.id] = []
            self._events[project.id] = []
            self._locks[project.id] = threading.RLock()

    # ------------------------------------------------------------- mutations

    def create_card(
        self,
        project_id: str,
        kind: CardKind | str,
        title: str,
        parent_id: str | None = None,
        position: int | None = None,
    ) -> Card:
        try:
            kind = CardKind(kind)
        except ValueError:
            raise SchemaInvalid(f"unknown card kind {kind!r}") from None
        if kind not in MANUAL_KINDS:
            raise SchemaInvalid(f"cannot manually create {kind.value} cards")
        if not isinstance(title, str):
            raise SchemaInvalid("title must be text")
        with self.project_lock(project_id):
            if parent_id is not None:
                parent = self._cards[project_id].get(parent_id)
                if parent is None:
                    raise UnknownParent(f"no parent card {parent_id}")
                if kind is CardKind.FOLDER and parent.kind is not CardKind.FOLDER:
                    raise FolderInsideBundle("folders cannot be bundled inside cards")
            index = self._insertion_index(project_id, parent_id, position)
            at = self._clock()
            card = Card(
                id=self._new_id(),
                project_id=project_id,
                parent_id=parent_id,
                kind=kind,
                title=title,
                annotation="",
                color=None,
                order_index=index,
                collapsed=False,
                representations=[],
                provenance=None,
                created_at=at,
                updated_at=at,
            )
            payload = {"card": card.to_dict(), "index": index}
            self._commit(project_id, [("create_card", payload)], at)
            return self._cards[project_id][card.id]

    def commit_capture(
        self,
        project_id: str,
        draft: CardDraft,
        op_name: str,
        parent_id: str | None = None,
        position: int | None = None,
    ) -> Card:
        """Materialize a capture draft into a journaled card."""
        with self.project_lock(project_id):
            if parent_id is not None and parent_id not in self._cards[project_id]:
                raise UnknownParent(f"no parent card {parent_id}")
            index = self._insertion_index(project_id, parent_id, position)
            at = self._clock()
            card = self._materialize(project_id, draft, parent_id, index, at)
            payload = {"card": card.to_dict(), "index": index}
            self._commit(project_id, [(op_name, payload)], at)
            return self._cards[project_id][card.id]

    def commit_capture_batch(
        self, project_id: str, drafts: list[CardDraft], op_name: str
    ) -> list[Card]:
        """Append one card per draft at the root, as one atomic batch."""
        with self.project_lock(project_id):
            at = self._clock()
            base = len(self._children[project_id].get(None, ()))
            staged = []
            for offset, draft in enumerate(drafts):
                card = self._materialize(project_id, draft, None, base + offset, at)
                staged.append((op_name, {"card": card.to_dict(), "index": base + offset}))
            self._commit(project_id, staged, at)
            return [self._cards[project_id][entry[1]["card"]["id"]] for entry in staged]

    def _materialize(
        self,
        project_id: str,
        draft: CardDraft,
        parent_id: str | None,
        index: int,
        at: datetime,
    ) -> Card:
        if draft.kind is CardKind.FOLDER:
            raise SchemaInvalid("captures never produce folders")
        kinds_seen = set()
        for rep in draft.representations:
            if rep.repr_kind in kinds_seen:
                raise SchemaInvalid(f"duplicate representation {rep.repr_kind.value}")
            kinds_seen.add(rep.repr_kind)
            if rep.asset is not None:
                self.assets.require(rep.asset)
        provenance = draft.provenance
        if provenance is not None:
            for ref in (provenance.favicon, provenance.viewport_screenshot):
                if ref is not None:
                    self.assets.require(ref)
            if provenance.captured_at is None:
                provenance.captured_at = at
        reps = sorted(draft.representations, key=lambda rep: rep.repr_kind.value)
        return Card(
            id=self._new_id(),
            project_id=project_id,
            parent_id=parent_id,
            kind=draft.kind,
            title=draft.title,
            annotation="",
            color=None,
            order_index=index,
            collapsed=False,
            representations=reps,
            provenance=provenance,
            created_at=at,
            updated_at=at,
        )

    def move_card(
        self,
        project_id: str,
        card_id: str,
        new_parent_id: str | None,
        position: int,
    ) -> Card:
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            if new_parent_id is not None:
                parent = self._cards[project_id].get(new_parent_id)
                if parent is None:
                    raise UnknownCard(f"no card {new_parent_id}")
                if new_parent_id == card_id or self._is_descendant(
                    project_id, new_parent_id, of=card_id
                ):
                    raise CycleRejected("cannot move a card under itself")
                if card.kind is CardKind.FOLDER and parent.kind is not CardKind.FOLDER:
                    raise FolderInsideBundle("folders cannot be bundled inside cards")
            siblings = self._children[project_id].get(new_parent_id, [])
            limit = len(siblings) - 1 if card.parent_id == new_parent_id else len(siblings)
            if not 0 <= position <= limit:
                raise PositionOutOfRange(f"position {position} not in 0..{limit}")
            at = self._clock()
            payload = {"card_id": card_id, "parent_id": new_parent_id, "index": position}
            self._commit(project_id, [("move_card", payload)], at)
            return card

    def reorder_card(self, project_id: str, card_id: str, position: int) -> Card:
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            count = len(self._children[project_id].get(card.parent_id, ()))
            if not 0 <= position < count:
                raise PositionOutOfRange(f"position {position} not in 0..{count - 1}")
            at = self._clock()
            payload = {"card_id": card_id, "index": position}
            self._commit(project_id, [("reorder_card", payload)], at)
            return card

    def set_annotation(self, project_id: str, card_id: str, text: str) -> Card:
        if not isinstance(text, str):
            raise SchemaInvalid("annotation must be text")
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            at = self._clock()
            self._commit(
                project_id, [("set_annotation", {"card_id": card_id, "text": text})], at
            )
            return card

    def set_color(self, project_id: str, card_id: str, color: Color | str | None) -> Card:
        color = coerce_color(color)
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            at = self._clock()
            value = color.value if color else None
            self._commit(
                project_id, [("set_color", {"card_id": card_id, "color": value})], at
            )
            return card

    def set_collapsed(self, project_id: str, card_id: str, flag: bool) -> Card:
        if not isinstance(flag, bool):
            raise SchemaInvalid("collapsed flag must be boolean")
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            at = self._clock()
            self._commit(
                project_id, [("set_collapsed", {"card_id": card_id, "flag": flag})], at
            )
            return card

    def set_project_pinned(self, project_id: str, pinned: bool) -> Project:
        if not isinstance(pinned, bool):
            raise SchemaInvalid("pinned flag must be boolean")
        with self.project_lock(project_id):
            project = self.require_project(project_id)
            at = self._clock()
            self._commit(project_id, [("set_project_pinned", {"pinned": pinned})], at)
            return project

    def delete_card(self, project_id: str, card_id: str) -> int:
        """Delete a card and its whole subtree; returns the removed count."""
        with self.project_lock(project_id):
            self.require_card(project_id, card_id)
            removed = len(self._subtree_ids(project_id, card_id))
            at = self._clock()
            self._commit(project_id, [("delete_card", {"card_id": card_id})], at)
            return removed

    def attach_extracted_text(self, project_id: str, card_id: str, text: str) -> Card:
        """Store recognizer output as the card's extracted-text form."""
        with self.project_lock(project_id):
            card = self.require_card(project_id, card_id)
            self._check_attachable(card)
            at = self._clock()
            self._commit(
                project_id, [("attach_text", {"card_id": card_id, "text": text})], at
            )
            return card

    @staticmethod
    def _check_attachable(card: Card) -> None:
        if card.representation(ReprKind.REGION_IMAGE) is None:
            raise NoImage("card has no region image to recognize")
        if card.representation(ReprKind.EXTRACTED_TEXT) is not None:
            raise AlreadyHasText("card already has extracted text")

    # ---------------------------------------------------------- commit/apply

    def _insertion_index(
        self, project_id: str, parent_id: str | None, position: int | None
    ) -> int:
        count = len(self._children[project_id].get(parent_id, ()))
        if position is None:
            return count
        if not 0 <= position <= count:
            raise PositionOutOfRange(f"position {position} not in 0..{count}")
        return position

    def _is_descendant(self, project_id: str, node_id: str, of: str) -> bool:
        cards = self._cards[project_id]
        current = cards[node_id].parent_id
        while current is not None:
            if current == of:
                return True
            current = cards[current].parent_id
        return False

    def _subtree_ids(self, project_id: str, root_id: str) -> list[str]:
        children = self._children[project_id]
        out = []
        stack = [root_id]
        while stack:
            cid = stack.pop()
            out.append(cid)
            stack.extend(reversed(children.get(cid, ())))
        return out

    def _commit(self, project_id: str, staged: list[tuple[str, dict]], at: datetime) -> None:
        events = self._events[project_id]
        records = []
        for op_name, payload in staged:
            event = JournalEvent(
                seq=len(events) + 1, op_name=op_name, payload=payload, at=at
            )
            self._apply_event(project_id, event)
            events.append(event)
            records.append({"type": "event", **event.to_dict()})
        self._projects[project_id].revision = len(events)
        self._notify(project_id, records)

    def _apply_event(self, project_id: str, event: JournalEvent) -> None:
        applier = _APPLIERS.get(event.op_name)
        if applier is None:
            raise UnknownOp(f"unknown operation {event.op_name!r}")
        applier(self, project_id, event)

    def _densify(self, project_id: str, parent_id: str | None) -> None:
        cards = self._cards[project_id]
        for index, cid in enumerate(self._children[project_id].get(parent_id, ())):
            cards[cid].order_index = index

    def _apply_insert_card(self, project_id: str, event: JournalEvent) -> None:
        card = Card.from_dict(event.payload["card"], project_id)
        siblings = self._children[project_id].setdefault(card.parent_id, [])
        siblings.insert(event.payload["index"], card.id)
        self._cards[project_id][card.id] = card
        self._card_location[card.id] = project_id
        self._densify(project_id, card.parent_id)

    def _apply_move(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        new_parent = event.payload["parent_id"]
        old_parent = card.parent_id
        self._children[project_id][old_parent].remove(card.id)
        self._children[project_id].setdefault(new_parent, []).insert(
            event.payload["index"], card.id
        )
        card.parent_id = new_parent
        card.updated_at = event.at
        self._densify(project_id, old_parent)
        if new_parent != old_parent:
            self._densify(project_id, new_parent)

    def _apply_reorder(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        siblings = self._children[project_id][card.parent_id]
        siblings.remove(card.id)
        siblings.insert(event.payload["index"], card.id)
        card.updated_at = event.at
        self._densify(project_id, card.parent_id)

    def _apply_set_annotation(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        card.annotation = event.payload["text"]
        card.updated_at = event.at

    def _apply_set_color(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        value = event.payload["color"]
        card.color = Color(value) if value else None
        card.updated_at = event.at

    def _apply_set_collapsed(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        card.collapsed = event.payload["flag"]
        card.updated_at = event.at

    def _apply_set_pinned(self, project_id: str, event: JournalEvent) -> None:
        self._projects[project_id].pinned = event.payload["pinned"]

    def _apply_delete(self, project_id: str, event: JournalEvent) -> None:
        card_id = event.payload["card_id"]
        parent_id = self._cards[project_id][card_id].parent_id
        cards = self._cards[project_id]
        children = self._children[project_id]
        for cid in self._subtree_ids(project_id, card_id):
            del cards[cid]
            children.pop(cid, None)
            if self._card_location.get(cid) == project_id:
                del self._card_location[cid]
        children[parent_id].remove(card_id)
        self._densify(project_id, parent_id)

    def _apply_attach_text(self, project_id: str, event: JournalEvent) -> None:
        card = self._cards[project_id][event.payload["card_id"]]
        card.representations.append(
            Representation(ReprKind.EXTRACTED_TEXT, text=event.payload["text"])
        )
        card.representations.sort(key=lambda rep: rep.repr_kind.value)
        card.updated_at = event.at

    # ------------------------------------------------------- export / import

    def export_snapshot(self, project_id: str) -> dict:
        """Deterministic snapshot: header, cards in depth-first order, manifest."""
        with self.project_lock(project_id):
            project = self.require_project(project_id)
            children = self._children[project_id]
            cards = self._cards[project_id]
            ordered: list[Card] = []
            stack = list(reversed(children.get(None, ())))
            while stack:
                card = cards[stack.pop()]
                ordered.append(card)
                stack.extend(reversed(children.get(card.id, ())))
            manifest = {}
            for card in ordered:
                for ref in card.asset_refs():
                    if ref not in manifest:
                        manifest[ref] = self.assets.record(ref).to_dict()
            return {
                "format": SNAPSHOT_FORMAT,
                "version": SNAPSHOT_VERSION,
                "project": project.to_dict(),
                "cards": [card.to_dict() for card in ordered],
                "assets": manifest,
            }

    def export_bytes(self, project_id: str) -> bytes:
        return canonical_json_bytes(self.export_snapshot(project_id))

    def import_project(self, snapshot: dict) -> Project:
        """Create a new project from a snapshot; card ids are preserved."""
        cards, children = self._validate_snapshot(snapshot)
        header = snapshot["project"]
        project = Project(
            id=self._new_id(),
            name=header["name"],
            pinned=header["pinned"],
            created_at=_parse_header_timestamp(header["created_at"]),
        )
        self._register_project(project)
        self._install_cards(project.id, cards, children)
        snapshot_hash = sha256_hex(canonical_json_bytes(snapshot))
        records = [
            {"type": "project", "project": project.to_dict()},
            {"type": "import", "snapshot_hash": snapshot_hash, "snapshot": snapshot},
        ]
        self._genesis[project.id].extend(records)
        self._notify(project.id, records)
        return project

    def _install_cards(
        self,
        project_id: str,
        cards: dict[str, Card],
        children: dict[str | None, list[str]],
    ) -> None:
        for card in cards.values():
            card.project_id = project_id
            self._cards[project_id][card.id] = card
            self._card_location[card.id] = project_id
        self._children[project_id].update(children)

    def _validate_snapshot(
        self, snapshot: dict
    ) -> tuple[dict[str, Card], dict[str | None, list[str]]]:
        if not isinstance(snapshot, dict):
            raise SchemaInvalid("snapshot must be an object")
        if snapshot.get("format") != SNAPSHOT_FORMAT:
            raise SchemaInvalid("unrecognized snapshot format")
        if snapshot.get("version") != SNAPSHOT_VERSION:
            raise SchemaInvalid(f"unsupported snapshot version {snapshot.get('version')!r}")
        header = snapshot.get("project")
        if not isinstance(header, dict):
            raise SchemaInvalid("snapshot missing project header")
        for field_name, kind in (("id", str), ("name", str), ("pinned", bool), ("created_at", str)):
            if not isinstance(header.get(field_name), kind):
                raise SchemaInvalid(f"project header field {field_name!r} invalid")
        _parse_header_timestamp(header["created_at"])
        card_docs = snapshot.get("cards")
        manifest = snapshot.get("assets")
        if not isinstance(card_docs, list) or not isinstance(manifest, dict):
            raise SchemaInvalid("snapshot missing cards list or asset manifest")

        cards: dict[str, Card] = {}
        for doc in card_docs:
            if not isinstance(doc, dict):
                raise SchemaInvalid("card record must be an object")
            try:
                card = Card.from_dict(doc, header["id"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaInvalid(f"malformed card record: {exc}") from exc
            if card.id in cards:
                raise InvariantViolation("unique card ids", f"duplicate id {card.id}")
            cards[card.id] = card

        for card in cards.values():
            if card.parent_id is not None and card.parent_id not in cards:
                raise InvariantViolation("forest", f"card {card.id} has unknown parent")
        for card in cards.values():
            seen = {card.id}
            cursor = card.parent_id
            while cursor is not None:
                if cursor in seen:
                    raise InvariantViolation("forest", f"cycle through card {cursor}")
                seen.add(cursor)
                cursor = cards[cursor].parent_id

        grouped: dict[str | None, list[Card]] = {}
        for card in cards.values():
            grouped.setdefault(card.parent_id, []).append(card)
        children: dict[str | None, list[str]] = {}
        for parent_id, group in grouped.items():
            indices = sorted(card.order_index for card in group)
            if indices != list(range(len(group))):
                raise InvariantViolation(
                    "dense indices", f"siblings under {parent_id!r} are not 0..{len(group) - 1}"
                )
            group.sort(key=lambda card: card.order_index)
            children[parent_id] = [card.id for card in group]

        for card in cards.values():
            if card.kind is CardKind.FOLDER:
                if card.parent_id is not None and cards[card.parent_id].kind is not CardKind.FOLDER:
                    raise InvariantViolation("folder rule", f"folder {card.id} inside a bundle")
                if card.representations:
                    raise InvariantViolation(
                        "folder representations", f"folder {card.id} has representations"
                    )
            kinds_seen = set()
            for rep in card.representations:
                if rep.repr_kind in kinds_seen:
                    raise InvariantViolation(
                        "representation kinds", f"card {card.id} repeats {rep.repr_kind.value}"
                    )
                kinds_seen.add(rep.repr_kind)
            if card.kind is CardKind.REGION_CLIP and ReprKind.REGION_IMAGE not in kinds_seen:
                raise InvariantViolation(
                    "region image", f"region clip {card.id} lacks its region image"
                )

        for digest, entry in manifest.items():
            if (
                not isinstance(entry, dict)
                or not isinstance(entry.get("media_type"), str)
                or not isinstance(entry.get("byte_length"), int)
            ):
                raise SchemaInvalid(f"malformed manifest entry for {digest}")

        referenced: set[str] = set()
        for card in cards.values():
            for ref in card.asset_refs():
                if ref not in manifest:
                    raise SchemaInvalid(f"asset {ref} not in snapshot manifest")
                if ref not in self.assets:
                    raise MissingAsset(f"asset {ref} not in store")
                referenced.add(ref)
        stray = set(manifest) - referenced
        if stray:
            raise SchemaInvalid(
                f"manifest lists unreferenced asset(s): {', '.join(sorted(stray))}"
            )

        return cards, children

    # ----------------------------------------------------------------- replay

    def restore_project(
        self,
        genesis: list[dict],
        events: list[dict],
        checkpoint: dict | None = None,
    ) -> Project:
        """Rebuild a project from durable records, fast-forwarding from an
        optional checkpoint: events at or below its revision are kept for the
        journal but not re-applied."""
        if not genesis or genesis[0].get("type") != "project":
            raise SchemaInvalid("journal must start with a project record")
        header = genesis[0].get("project")
        if not isinstance(header, dict):
            raise SchemaInvalid("malformed project record")
        project = Project(
            id=header["id"],
            name=header["name"],
            pinned=header["pinned"],
            created_at=_parse_header_timestamp(header["created_at"]),
        )
        if project.id in self._projects:
            raise SchemaInvalid(f"project {project.id} already present")
        self._register_project(project)
        self._genesis[project.id].extend(genesis)

        applied_until = 0
        if checkpoint is not None:
            snapshot = checkpoint.get("snapshot")
            revision = checkpoint.get("revision")
            if not isinstance(revision, int) or isinstance(revision, bool) or revision < 0:
                raise SchemaInvalid("checkpoint revision must be a non-negative integer")
            cards, children = self._validate_snapshot(snapshot)
            if snapshot["project"]["id"] != project.id:
                raise SchemaInvalid("checkpoint belongs to a different project")
            self._install_cards(project.id, cards, children)
            project.pinned = snapshot["project"]["pinned"]
            applied_until = revision
        elif len(genesis) > 1 and genesis[1].get("type") == "import":
            cards, children = self._validate_snapshot(genesis[1].get("snapshot"))
            self._install_cards(project.id, cards, children)

        event_log = self._events[project.id]
        for record in events:
            if record.get("type") != "event":
                raise SchemaInvalid(f"unexpected journal record type {record.get('type')!r}")
            event = JournalEvent.from_dict(record)
            if event.seq != len(event_log) + 1:
                raise GapInSequence(
                    f"event seq {event.seq} after {len(event_log)} journaled events"
                )
            if event.seq > applied_until:
                self._apply_event(project.id, event)
            event_log.append(event)
        if len(event_log) < applied_until:
            raise GapInSequence(
                f"checkpoint at revision {applied_until} but journal has {len(event_log)} events"
            )
        project.revision = len(event_log)
        return project

    def replay_journal(self, records: Iterable[dict]) -> Project:
        """Rebuild a project from its journal records (genesis plus events)."""
        records = list(records)
        genesis: list[dict] = []
        cursor = 0
        if records and records[0].get("type") == "project":
            genesis.append(records[0])
            cursor = 1
        if cursor < len(records) and records[cursor].get("type") == "import":
            genesis.append(records[cursor])
            cursor += 1
        return self.restore_project(genesis, records[cursor:])


_APPLIERS: dict[str, Callable[[CardStore, str, JournalEvent], None]] = {
    "create_card": CardStore._apply_insert_card,
    "capture_text": CardStore._apply_insert_card,
    "capture_image": CardStore._apply_insert_card,
    "capture_bookmark": CardStore._apply_insert_card,
    "capture_region": CardStore._apply_insert_card,
    "move_card": CardStore._apply_move,
    "reorder_card": CardStore._apply_reorder,
    "set_annotation": CardStore._apply_set_annotation,
    "set_color": CardStore._apply_set_color,
    "set_collapsed": CardStore._apply_set_collapsed,
    "set_project_pinned": CardStore._apply_set_pinned,
    "delete_card": CardStore._apply_delete,
    "attach_text": CardStore._apply_attach_text,
}


def _parse_header_timestamp(text: str) -> datetime:
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise SchemaInvalid(f"bad timestamp {text!r}") from exc

"""Durable storage under a data directory.

Layout:

    <data-dir>/assets/                      content-addressed blobs
    <data-dir>/projects/<id>/journal.jsonl  genesis + events, one JSON per line
    <data-dir>/projects/<id>/snapshot.json  periodic checkpoint

The journal is the source of truth; checkpoints only shorten recovery, which
loads the latest checkpoint (when present) and replays the journal tail.
"""

from __future__ import annotations

import json
from pathlib import Path

from .assets import DirectoryAssetStore
from .canonical import canonical_json_bytes, canonical_json_line
from .errors import SchemaInvalid
from .store import CardStore, Clock, IdFactory, random_id, system_clock

JOURNAL_NAME = "journal.jsonl"
CHECKPOINT_NAME = "snapshot.json"
DEFAULT_CHECKPOINT_EVERY = 100


class DataDir:
    """Owns the on-disk layout and keeps an open store durable."""

    def __init__(self, path: str | Path, checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> None:
        self.path = Path(path)
        self.checkpoint_every = max(1, checkpoint_every)
        self.path.mkdir(parents=True, exist_ok=True)
        (self.path / "projects").mkdir(exist_ok=True)
        self._store: CardStore | None = None
        self._events_since_checkpoint: dict[str, int] = {}

    def project_dir(self, project_id: str) -> Path:
        return self.path / "projects" / project_id

    def open_store(
        self, clock: Clock = system_clock, id_factory: IdFactory = random_id
    ) -> CardStore:
        """Load everything from disk and return a store that persists writes."""
        assets = DirectoryAssetStore(self.path / "assets")
        store = CardStore(assets=assets, clock=clock, id_factory=id_factory)
        for project_dir in sorted((self.path / "projects").iterdir()):
            if not project_dir.is_dir():
                continue
            self._recover_project(store, project_dir)
        store.subscribe(self._on_records)
        self._store = store
        return store

    def _recover_project(self, store: CardStore, project_dir: Path) -> None:
        journal_path = project_dir / JOURNAL_NAME
        if not journal_path.exists():
            return
        genesis: list[dict] = []
        events: list[dict] = []
        with journal_path.open("r", encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaInvalid(
                        f"{journal_path}:{line_number}: corrupt journal line"
                    ) from exc
                if record.get("type") == "event":
                    events.append(record)
                else:
                    genesis.append(record)
        checkpoint = None
        checkpoint_path = project_dir / CHECKPOINT_NAME
        if checkpoint_path.exists():
            checkpoint = json.loads(checkpoint_path.read_text(encoding="utf-8"))
        project = store.restore_project(genesis, events, checkpoint)
        self._events_since_checkpoint[project.id] = 0

    def _on_records(self, project_id: str, records: list[dict]) -> None:
        project_dir = self.project_dir(project_id)
        project_dir.mkdir(parents=True, exist_ok=True)
        with (project_dir / JOURNAL_NAME).open("ab") as handle:
            for record in records:
                handle.write(canonical_json_line(record))
            handle.flush()
        events = sum(1 for record in records if record.get("type") == "event")
        if events == 0:
            return
        count = self._events_since_checkpoint.get(project_id, 0) + events
        if count >= self.checkpoint_every:
            self.write_checkpoint(project_id)
            count = 0
        self._events_since_checkpoint[project_id] = count

    def write_checkpoint(self, project_id: str) -> None:
        """Atomically persist the current state as the recovery baseline."""
        if self._store is None:
            raise RuntimeError("no open store to checkpoint")
        document = {
            "revision": self._store.revision(project_id),
            "snapshot": self._store.export_snapshot(project_id),
        }
        target = self.project_dir(project_id) / CHECKPOINT_NAME
        tmp = target.with_suffix(".json.tmp")
        tmp.write_bytes(canonical_json_bytes(document))
        tmp.replace(target)

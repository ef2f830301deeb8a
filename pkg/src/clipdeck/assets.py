"""Content-addressed binary storage for screenshots, favicons, and archives.

Assets are keyed by the lowercase hex SHA-256 of their bytes. Writing the
same bytes twice is a no-op, so capture and replay can share one store and
journal events only ever need to carry hashes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .canonical import sha256_hex
from .errors import MalformedHash, MissingAsset, UnsupportedMediaType

IMAGE_MEDIA_TYPES = frozenset(
    {
        "image/png",
        "image/jpeg",
        "image/gif",
        "image/webp",
        "image/svg+xml",
    }
)

ALLOWED_MEDIA_TYPES = IMAGE_MEDIA_TYPES | {
    "application/octet-stream",
    "text/html",
}

_HASH_RE = re.compile(r"^[0-9a-f]{64}$")


def validate_hash(value: str) -> str:
    if not isinstance(value, str) or not _HASH_RE.match(value):
        raise MalformedHash(f"not a sha-256 hex digest: {value!r}")
    return value


@dataclass
class AssetRecord:
    hash: str
    media_type: str
    byte_length: int

    def to_dict(self) -> dict:
        return {"media_type": self.media_type, "byte_length": self.byte_length}


class AssetStore:
    """In-memory content-addressed store."""

    def __init__(self) -> None:
        self._blobs: dict[str, bytes] = {}
        self._records: dict[str, AssetRecord] = {}

    def put(self, data: bytes, media_type: str) -> str:
        """Store bytes, returning their hash. Idempotent per content."""
        if media_type not in ALLOWED_MEDIA_TYPES:
            raise UnsupportedMediaType(f"unsupported media type {media_type!r}")
        digest = sha256_hex(data)
        if digest not in self._blobs:
            self._write_blob(digest, data, media_type)
            self._records[digest] = AssetRecord(digest, media_type, len(data))
            self._blobs[digest] = data
        return digest

    def get(self, digest: str) -> tuple[bytes, AssetRecord]:
        validate_hash(digest)
        record = self._records.get(digest)
        if record is None:
            raise MissingAsset(f"no asset {digest}")
        return self._blobs[digest], record

    def record(self, digest: str) -> AssetRecord:
        validate_hash(digest)
        record = self._records.get(digest)
        if record is None:
            raise MissingAsset(f"no asset {digest}")
        return record

    def __contains__(self, digest: str) -> bool:
        return digest in self._records

    def require(self, digest: str) -> str:
        """Assert the hash refers to stored bytes; used by card committers."""
        validate_hash(digest)
        if digest not in self._records:
            raise MissingAsset(f"no asset {digest}")
        return digest

    def _write_blob(self, digest: str, data: bytes, media_type: str) -> None:
        """Hook for durable subclasses; in-memory store does nothing extra."""


class DirectoryAssetStore(AssetStore):
    """Asset store mirrored to a directory, one file per hash plus a .meta."""

    def __init__(self, root: Path) -> None:
        super().__init__()
        self._root = Path(root)
        self._root.mkdir(parents=True, exist_ok=True)
        self._load()

    def _load(self) -> None:
        for meta_path in sorted(self._root.glob("*.meta")):
            digest = meta_path.stem
            if not _HASH_RE.match(digest):
                continue
            blob_path = self._root / digest
            if not blob_path.exists():
                continue
            media_type = meta_path.read_text(encoding="utf-8").strip()
            data = blob_path.read_bytes()
            self._blobs[digest] = data
            self._records[digest] = AssetRecord(digest, media_type, len(data))

    def _write_blob(self, digest: str, data: bytes, media_type: str) -> None:
        blob_path = self._root / digest
        tmp_path = self._root / f".{digest}.tmp"
        tmp_path.write_bytes(data)
        tmp_path.replace(blob_path)
        (self._root / f"{digest}.meta").write_text(media_type, encoding="utf-8")

"""Canonical serialization: deterministic JSON bytes and a fixed timestamp format.

Snapshot exports, journal files, and event payloads all round-trip through
this encoding, which is what makes byte-identity contracts (live vs. replay,
export/import round trips) checkable. Keys are sorted, separators are
compact, and timestamps are UTC with exactly six fractional digits. Floats
are rejected outright; the model only ever stores integers, so a float
reaching the encoder is a bug.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone

TIMESTAMP_SUFFIX = "Z"
_TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%S.%f"


def format_timestamp(value: datetime) -> str:
    """Render a timezone-aware datetime as ``YYYY-MM-DDTHH:MM:SS.ffffffZ``."""
    if value.tzinfo is None:
        raise ValueError("naive datetime cannot be serialized canonically")
    return value.astimezone(timezone.utc).strftime(_TIMESTAMP_FMT) + TIMESTAMP_SUFFIX


def parse_timestamp(text: str) -> datetime:
    if not text.endswith(TIMESTAMP_SUFFIX):
        raise ValueError(f"timestamp missing {TIMESTAMP_SUFFIX!r} suffix: {text!r}")
    parsed = datetime.strptime(text[:-1], _TIMESTAMP_FMT)
    return parsed.replace(tzinfo=timezone.utc)


def _reject_floats(value: object) -> None:
    if isinstance(value, float):
        raise ValueError("floats are not canonically serializable")
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise ValueError(f"non-string key {key!r}")
            _reject_floats(item)
    elif isinstance(value, (list, tuple)):
        for item in value:
            _reject_floats(item)
    elif not isinstance(value, (str, int, bool)) and value is not None:
        raise ValueError(f"non-canonical value of type {type(value).__name__}")


def canonical_json_bytes(document: object) -> bytes:
    """Encode a JSON-compatible document deterministically as UTF-8 bytes."""
    _reject_floats(document)
    return json.dumps(
        document, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def canonical_json_line(document: object) -> bytes:
    return canonical_json_bytes(document) + b"\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()

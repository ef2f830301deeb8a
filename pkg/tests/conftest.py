from __future__ import annotations

import itertools
from datetime import datetime, timedelta, timezone

import pytest

from clipdeck import CardStore, CaptureContext


class FakeClock:
    """Deterministic clock: starts at a fixed instant, ticks 1 ms per call."""

    def __init__(self, start: datetime | None = None) -> None:
        self.now = start or datetime(2021, 6, 1, 12, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        current = self.now
        self.now = current + timedelta(milliseconds=1)
        return current


def sequential_ids(prefix: str = "id"):
    counter = itertools.count(1)
    return lambda: f"{prefix}-{next(counter):06d}"


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def store(clock: FakeClock) -> CardStore:
    return CardStore(clock=clock, id_factory=sequential_ids())


@pytest.fixture
def project(store: CardStore):
    return store.create_project("Wireless headphone shopping")


@pytest.fixture
def ctx() -> CaptureContext:
    return CaptureContext(
        source_url="https://shop.example.com/headphones",
        page_title="Best wireless headphones",
    )


PNG_BYTES = b"\x89PNG\r\n\x1a\n fake image payload"
JPEG_BYTES = b"\xff\xd8\xff\xe0 fake jpeg payload"
ARCHIVE_BYTES = b"<html><body>archived page</body></html>"

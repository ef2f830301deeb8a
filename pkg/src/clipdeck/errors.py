"""Domain errors shared by the store, capture pipeline, and HTTP service.

Each error carries a stable ``code`` (used in API error bodies) and the
HTTP status it maps to: validation failures are 400, missing entities 404,
optimistic-concurrency rejections 409.
"""

from __future__ import annotations


class ClipdeckError(Exception):
    """Base class for all domain errors."""

    code = "Error"
    http_status = 400


# -- not found (404) --------------------------------------------------------


class UnknownProject(ClipdeckError):
    code = "UnknownProject"
    http_status = 404


class UnknownCard(ClipdeckError):
    code = "UnknownCard"
    http_status = 404


class UnknownParent(ClipdeckError):
    code = "UnknownParent"
    http_status = 404


class NotFound(ClipdeckError):
    """Asset lookup miss."""

    code = "NotFound"
    http_status = 404


# -- validation (400) -------------------------------------------------------


class EmptyName(ClipdeckError):
    code = "EmptyName"


class FolderInsideBundle(ClipdeckError):
    code = "FolderInsideBundle"


class PositionOutOfRange(ClipdeckError):
    code = "PositionOutOfRange"


class CycleRejected(ClipdeckError):
    code = "CycleRejected"


class UnknownColor(ClipdeckError):
    code = "UnknownColor"


class SchemaInvalid(ClipdeckError):
    code = "SchemaInvalid"


class InvariantViolation(ClipdeckError):
    """Snapshot violates a structural invariant; ``invariant`` names it."""

    code = "InvariantViolation"

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class MissingAsset(ClipdeckError):
    code = "MissingAsset"


class GapInSequence(ClipdeckError):
    code = "GapInSequence"


class UnknownOp(ClipdeckError):
    code = "UnknownOp"


class EmptySelection(ClipdeckError):
    code = "EmptySelection"


class EmptyPayload(ClipdeckError):
    code = "EmptyPayload"


class UnsupportedMediaType(ClipdeckError):
    code = "UnsupportedMediaType"


class MissingUrl(ClipdeckError):
    code = "MissingUrl"


class EmptyTabList(ClipdeckError):
    code = "EmptyTabList"


class NoImage(ClipdeckError):
    code = "NoImage"


class AlreadyHasText(ClipdeckError):
    code = "AlreadyHasText"


class EngineFailure(ClipdeckError):
    code = "EngineFailure"


class MalformedHash(ClipdeckError):
    code = "MalformedHash"


# -- concurrency (409) ------------------------------------------------------


class RevisionConflict(ClipdeckError):
    """Envelope's expected revision is stale; carries the current one."""

    code = "RevisionConflict"
    http_status = 409

    def __init__(self, current_revision: int):
        self.current_revision = current_revision
        super().__init__(f"current revision is {current_revision}")

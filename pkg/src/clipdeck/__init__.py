"""clipdeck: a local-first web clipping and sensemaking engine.

Capture text selections, images, page regions, bookmarks, and whole tab
sets into card-based projects; organize cards with folders and container
cards; and keep everything replayable through per-project journals, all
behind a loopback HTTP service.
"""

from .assets import AssetStore, DirectoryAssetStore
from .capture import (
    BoundingBox,
    CaptureContext,
    LayoutNode,
    capture_bookmark,
    capture_image,
    capture_region,
    capture_text,
    import_tabs,
    rect_iou,
    resolve_region,
)
from .errors import ClipdeckError, RevisionConflict
from .model import Card, CardKind, Color, Project, Representation, ReprKind
from .persistence import DataDir
from .service import ClipdeckService, create_app
from .store import CardStore
from .views import flatten_reader_view, peek, preview_grid, project_overview

__version__ = "0.1.0"

__all__ = [
    "AssetStore",
    "BoundingBox",
    "Card",
    "CardKind",
    "CardStore",
    "CaptureContext",
    "ClipdeckError",
    "ClipdeckService",
    "Color",
    "DataDir",
    "DirectoryAssetStore",
    "LayoutNode",
    "Project",
    "Representation",
    "ReprKind",
    "RevisionConflict",
    "capture_bookmark",
    "capture_image",
    "capture_region",
    "capture_text",
    "create_app",
    "flatten_reader_view",
    "import_tabs",
    "peek",
    "preview_grid",
    "project_overview",
    "rect_iou",
    "resolve_region",
    "__version__",
]

from __future__ import annotations

import pytest

from clipdeck import CaptureContext
from clipdeck.capture import capture_bookmark, capture_image, capture_text
from clipdeck.errors import UnknownCard, UnknownProject
from clipdeck.model import CardKind
from clipdeck.views import (
    EXCERPT_LIMIT,
    card_summary,
    flatten_reader_view,
    header_image,
    peek,
    preview_grid,
    preview_grid_counts,
    project_overview,
    source_host,
)

from .conftest import PNG_BYTES


def make_card(store, project_id, title, parent_id=None, kind=CardKind.MANUAL):
    return store.create_card(project_id, kind, title, parent_id=parent_id)


def overview_ids(nodes):
    """Flatten an overview forest into the card ids it shows, in order."""
    out = []
    for node in nodes:
        out.append(node["card"]["card_id"])
        out.extend(overview_ids(node["children"]))
    return out


# --- card summaries -------------------------------------------------------


def test_summary_fields_for_plain_card(store, project):
    card = make_card(store, project.id, "Focus points")
    store.set_annotation(project.id, card.id, "a" * 200)
    store.set_color(project.id, card.id, "GREEN")
    summary = card_summary(store, card)
    assert summary == {
        "card_id": card.id,
        "kind": "MANUAL",
        "title": "Focus points",
        "header_image": None,
        "source_host": "",
        "annotation_excerpt": "a" * EXCERPT_LIMIT,
        "child_count": 0,
        "collapsed": False,
        "color": "GREEN",
    }


def test_summary_child_count_tracks_direct_children(store, project):
    parent = make_card(store, project.id, "Parent")
    for title in ("a", "b", "c"):
        make_card(store, project.id, title, parent_id=parent.id)
    grandchild_parent = store.child_ids(project.id, parent.id)[0]
    make_card(store, project.id, "nested", parent_id=grandchild_parent)
    summary = card_summary(store, store.require_card(project.id, parent.id))
    assert summary["child_count"] == 3


def test_source_host_empty_iff_no_provenance(store, project, ctx):
    manual = make_card(store, project.id, "Manual")
    clipped = capture_text(store, project.id, "some words", ctx)
    assert source_host(manual) == ""
    assert source_host(clipped) == "shop.example.com"


def test_header_image_prefers_region_image(store, project, ctx):
    image_card = capture_image(store, project.id, PNG_BYTES, "image/png", ctx)
    text_card = capture_text(store, project.id, "plain words", ctx)
    assert header_image(image_card) == image_card.representations[0].asset
    assert header_image(text_card) is None


def test_header_image_for_bookmark_is_viewport(store, project):
    ctx = CaptureContext(
        source_url="https://news.example.com/story",
        page_title="Story",
        viewport_screenshot=PNG_BYTES,
    )
    card = capture_bookmark(store, project.id, ctx)
    assert header_image(card) == card.provenance.viewport_screenshot
    assert header_image(card) is not None


# --- project overview -----------------------------------------------------


def test_overview_lists_folder_children_and_hides_bundled(store, project, ctx):
    folder = make_card(store, project.id, "F", kind=CardKind.FOLDER)
    x = make_card(store, project.id, "x", parent_id=folder.id)
    y = make_card(store, project.id, "y", parent_id=folder.id)
    container = make_card(store, project.id, "C")
    z = capture_text(store, project.id, "bundled away", ctx, parent_id=container.id)

    forest = project_overview(store, project.id)
    assert overview_ids(forest) == [folder.id, x.id, y.id, container.id]

    c_node = forest[1]
    assert c_node["card"]["card_id"] == container.id
    assert c_node["card"]["child_count"] == 1
    assert c_node["children"] == []
    assert c_node["preview"] == {"squares_shown": 1, "overflow": 0}
    assert z.id not in overview_ids(forest)


def test_overview_of_empty_project(store, project):
    assert project_overview(store, project.id) == []


def test_overview_three_folder_levels_inline(store, project):
    top = make_card(store, project.id, "top", kind=CardKind.FOLDER)
    mid = make_card(store, project.id, "mid", parent_id=top.id, kind=CardKind.FOLDER)
    leaf = make_card(store, project.id, "leaf", parent_id=mid.id)
    forest = project_overview(store, project.id)
    assert overview_ids(forest) == [top.id, mid.id, leaf.id]
    assert forest[0]["children"][0]["children"][0]["card"]["card_id"] == leaf.id


def test_overview_unknown_project(store):
    with pytest.raises(UnknownProject):
        project_overview(store, "nope")


# --- preview grids --------------------------------------------------------


@pytest.mark.parametrize(
    ("children", "shown", "overflow"),
    [(0, 0, 0), (4, 4, 0), (9, 9, 0), (12, 9, 3)],
)
def test_preview_grid_counts(children, shown, overflow):
    assert preview_grid_counts(children) == {
        "squares_shown": shown,
        "overflow": overflow,
    }


def test_preview_grid_reads_live_children(store, project):
    parent = make_card(store, project.id, "holder")
    for index in range(12):
        make_card(store, project.id, f"child {index}", parent_id=parent.id)
    assert preview_grid(store, parent.id) == {"squares_shown": 9, "overflow": 3}


def test_preview_grid_unknown_card(store, project):
    with pytest.raises(UnknownCard):
        preview_grid(store, "missing")


# --- peek -----------------------------------------------------------------


def test_peek_mixes_images_and_excerpts(store, project, ctx):
    container = make_card(store, project.id, "C")
    image_child = capture_image(
        store, project.id, PNG_BYTES, "image/png", ctx, parent_id=container.id
    )
    text_child = capture_text(
        store, project.id, "the best battery life", ctx, parent_id=container.id
    )
    entries = peek(store, container.id)
    assert [entry["card_id"] for entry in entries] == [image_child.id, text_child.id]

    image_entry, text_entry = entries
    assert image_entry["image"] == header_image(image_child)
    assert image_entry["excerpt"] is None
    assert image_entry["title"] == image_child.title
    assert text_entry["image"] is None
    assert text_entry["excerpt"] == "the best battery life"
    assert text_entry["title"] == text_child.title


def test_peek_on_leaf_is_empty(store, project):
    leaf = make_card(store, project.id, "leaf")
    assert peek(store, leaf.id) == []


def test_peek_does_not_recurse_into_inner_containers(store, project, ctx):
    outer = make_card(store, project.id, "outer")
    inner = make_card(store, project.id, "inner", parent_id=outer.id)
    capture_text(store, project.id, "deep", ctx, parent_id=inner.id)
    entries = peek(store, outer.id)
    assert [entry["card_id"] for entry in entries] == [inner.id]


def test_peek_excerpt_falls_back_to_annotation_then_title(store, project):
    parent = make_card(store, project.id, "holder")
    child = make_card(store, project.id, "Fallback title", parent_id=parent.id)
    assert peek(store, parent.id)[0]["excerpt"] == "Fallback title"
    store.set_annotation(project.id, child.id, "a note")
    assert peek(store, parent.id)[0]["excerpt"] == "a note"


def test_peek_excerpt_is_truncated(store, project, ctx):
    parent = make_card(store, project.id, "holder")
    capture_text(store, project.id, "w" * 500, ctx, parent_id=parent.id)
    excerpt = peek(store, parent.id)[0]["excerpt"]
    assert excerpt == "w" * EXCERPT_LIMIT


# --- reader view ----------------------------------------------------------


def test_reader_flattens_nested_containers(store, project, ctx):
    c = make_card(store, project.id, "C")
    a = capture_text(store, project.id, "alpha", ctx, parent_id=c.id)
    b = make_card(store, project.id, "b", parent_id=c.id)
    inner = capture_text(store, project.id, "gamma", ctx, parent_id=b.id)

    entries = flatten_reader_view(store, project.id, c.id)
    assert [(e["card"]["id"], e["depth"]) for e in entries] == [
        (c.id, 0),
        (a.id, 1),
        (b.id, 1),
        (inner.id, 2),
    ]


def test_reader_on_leaf(store, project):
    leaf = make_card(store, project.id, "leaf")
    entries = flatten_reader_view(store, project.id, leaf.id)
    assert [(e["card"]["id"], e["depth"]) for e in entries] == [(leaf.id, 0)]


def test_reader_over_whole_project(store, project):
    a = make_card(store, project.id, "A")
    x = make_card(store, project.id, "x", parent_id=a.id)
    b = make_card(store, project.id, "B")
    entries = flatten_reader_view(store, project.id)
    assert [(e["card"]["id"], e["depth"]) for e in entries] == [
        (a.id, 0),
        (x.id, 1),
        (b.id, 0),
    ]


def test_reader_includes_bundled_children(store, project, ctx):
    container = make_card(store, project.id, "C")
    hidden = capture_text(store, project.id, "hidden", ctx, parent_id=container.id)
    assert hidden.id not in overview_ids(project_overview(store, project.id))
    reader_ids = [e["card"]["id"] for e in flatten_reader_view(store, project.id)]
    assert reader_ids == [container.id, hidden.id]


def test_reader_unknown_root(store, project):
    with pytest.raises(UnknownCard):
        flatten_reader_view(store, project.id, "missing")
    with pytest.raises(UnknownProject):
        flatten_reader_view(store, "missing")

from __future__ import annotations

import json
import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, initialize, invariant, rule

from clipdeck.canonical import canonical_json_bytes
from clipdeck.capture import rect_iou, resolve_region
from clipdeck.errors import (
    CycleRejected,
    FolderInsideBundle,
    PositionOutOfRange,
    UnknownCard,
)
from clipdeck.model import CardKind
from clipdeck.stats import corpus_report, stats_from_cards
from clipdeck.store import CardStore
from clipdeck.views import flatten_reader_view, preview_grid, project_overview

from .conftest import FakeClock, sequential_ids
from .drivers import build_random_project, random_bbox, random_layout_tree
from .oracles import (
    brute_force_resolve,
    check_tree_invariants,
    naive_corpus,
    naive_project_stats,
    shapely_iou,
)


def fresh_store() -> CardStore:
    return CardStore(clock=FakeClock(), id_factory=sequential_ids())


def random_project(seed: int, steps: int) -> tuple[CardStore, str]:
    store = fresh_store()
    rng = random.Random(seed)
    project_id = build_random_project(store, rng, steps)
    return store, project_id


rects = st.tuples(
    st.integers(-100, 1100),
    st.integers(-100, 1100),
    st.integers(0, 500),
    st.integers(0, 500),
)


# --- geometry ---------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(rects, rects)
def test_iou_matches_geometry_oracle(rect_a, rect_b):
    assert rect_iou(rect_a, rect_b) == shapely_iou(rect_a, rect_b)


@settings(max_examples=200, deadline=None)
@given(rects, rects)
def test_iou_is_symmetric_and_bounded(rect_a, rect_b):
    forward = rect_iou(rect_a, rect_b)
    assert forward == rect_iou(rect_b, rect_a)
    assert Fraction(0) <= forward <= Fraction(1)


@settings(max_examples=100, deadline=None)
@given(rects)
def test_iou_identity(rect):
    assert rect_iou(rect, rect) == Fraction(1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_resolver_matches_brute_force(seed):
    rng = random.Random(seed)
    nodes = random_layout_tree(rng, max_nodes=60)
    for _ in range(5):
        bbox = random_bbox(rng, nodes)
        rect = (bbox.x, bbox.y, bbox.width, bbox.height)
        assert resolve_region(nodes, bbox) is brute_force_resolve(nodes, rect)


# --- canonical encoding -------------------------------------------------------

json_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-(2**53), 2**53),
    st.text(max_size=40),
)
json_docs = st.recursive(
    json_scalars,
    lambda inner: st.one_of(
        st.lists(inner, max_size=5), st.dictionaries(st.text(max_size=12), inner, max_size=5)
    ),
    max_leaves=25,
)


@settings(max_examples=200, deadline=None)
@given(json_docs)
def test_canonical_round_trip_and_stability(doc):
    encoded = canonical_json_bytes(doc)
    decoded = json.loads(encoded)
    assert decoded == doc
    assert canonical_json_bytes(decoded) == encoded


# --- randomized store sequences -------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_random_sequences_keep_invariants_and_replay(seed, steps):
    store, project_id = random_project(seed, steps)
    assert check_tree_invariants(store, project_id) == []

    twin = CardStore(assets=store.assets, clock=FakeClock(), id_factory=sequential_ids("t"))
    twin.replay_journal(store.journal_records(project_id))
    assert twin.export_bytes(project_id) == store.export_bytes(project_id)
    assert twin.revision(project_id) == store.revision(project_id)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 50))
def test_export_import_export_identity(seed, steps):
    store, project_id = random_project(seed, steps)
    snapshot = store.export_snapshot(project_id)
    imported = store.import_project(snapshot)

    original = json.loads(store.export_bytes(project_id))
    round_tripped = json.loads(store.export_bytes(imported.id))
    original["project"]["id"] = round_tripped["project"]["id"] = "MASKED"
    assert canonical_json_bytes(round_tripped) == canonical_json_bytes(original)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_reader_view_is_a_permutation_respecting_sibling_order(seed, steps):
    store, project_id = random_project(seed, steps)
    entries = flatten_reader_view(store, project_id)
    listed = [entry["card"]["id"] for entry in entries]
    assert sorted(listed) == sorted(store.cards(project_id))

    by_parent: dict = {}
    for card_id in listed:
        card = store.require_card(project_id, card_id)
        by_parent.setdefault(card.parent_id, []).append(card_id)
    for parent_id, seen_order in by_parent.items():
        assert seen_order == store.child_ids(project_id, parent_id)

    depth_by_id = {entry["card"]["id"]: entry["depth"] for entry in entries}
    for card_id, depth in depth_by_id.items():
        parent_id = store.require_card(project_id, card_id).parent_id
        expected = 0 if parent_id is None else depth_by_id[parent_id] + 1
        assert depth == expected


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_overview_shows_exactly_the_unbundled_cards(seed, steps):
    store, project_id = random_project(seed, steps)
    cards = store.cards(project_id)

    def visible(card_id: str) -> bool:
        cursor = cards[card_id].parent_id
        while cursor is not None:
            if cards[cursor].kind is not CardKind.FOLDER:
                return False
            cursor = cards[cursor].parent_id
        return True

    expected = {card_id for card_id in cards if visible(card_id)}

    def collect(nodes) -> set:
        seen = set()
        for node in nodes:
            seen.add(node["card"]["card_id"])
            seen |= collect(node["children"])
        return seen

    assert collect(project_overview(store, project_id)) == expected


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_preview_grid_arithmetic_everywhere(seed, steps):
    store, project_id = random_project(seed, steps)
    for card_id in store.cards(project_id):
        grid = preview_grid(store, card_id)
        child_count = len(store.child_ids(project_id, card_id))
        assert grid["squares_shown"] == min(child_count, 9)
        assert grid["squares_shown"] + grid["overflow"] == child_count


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_stats_match_naive_recount(seed, steps):
    store, project_id = random_project(seed, steps)
    cards = list(store.cards(project_id).values())
    mine = stats_from_cards(cards).to_dict()
    theirs = naive_project_stats(cards)
    for key, value in theirs.items():
        assert mine[key] == value, key


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_corpus_matches_naive_aggregation(seed):
    rng = random.Random(seed)
    store = fresh_store()
    all_stats = []
    for _ in range(rng.randint(1, 6)):
        project_id = build_random_project(store, rng, rng.randint(1, 40))
        all_stats.append(stats_from_cards(list(store.cards(project_id).values())))
    mine = corpus_report(all_stats).to_dict()
    theirs = naive_corpus([s.to_dict() for s in all_stats])
    for key, value in theirs.items():
        assert mine[key] == value, key


# --- stateful machine -----------------------------------------------------------


class StoreMachine(RuleBasedStateMachine):
    """Structural mutations interleaved, with the tree checked after each step
    and the journal replayed at teardown."""

    def __init__(self):
        super().__init__()
        self.store = fresh_store()
        self.project_id = self.store.create_project("stateful").id
        self.cards: list[str] = []

    @initialize()
    def seed_roots(self):
        for title in ("a", "b"):
            self.cards.append(
                self.store.create_card(self.project_id, "MANUAL", title).id
            )

    def pick(self, data, include_root=False):
        choices = list(self.cards)
        if include_root:
            choices.append(None)
        return data.draw(st.sampled_from(choices))

    @rule(data=st.data(), kind=st.sampled_from(["MANUAL", "FOLDER"]))
    def create(self, data, kind):
        parent_id = self.pick(data, include_root=True) if self.cards else None
        try:
            card = self.store.create_card(
                self.project_id, kind, f"card {len(self.cards)}", parent_id=parent_id
            )
        except (FolderInsideBundle, UnknownCard):
            return
        self.cards.append(card.id)

    @rule(data=st.data(), position=st.integers(0, 5))
    def move(self, data, position):
        if not self.cards:
            return
        card_id = self.pick(data)
        target = self.pick(data, include_root=True)
        try:
            self.store.move_card(self.project_id, card_id, target, position)
        except (CycleRejected, FolderInsideBundle, PositionOutOfRange, UnknownCard):
            pass

    @rule(data=st.data(), position=st.integers(0, 5))
    def reorder(self, data, position):
        if not self.cards:
            return
        try:
            self.store.reorder_card(self.project_id, self.pick(data), position)
        except PositionOutOfRange:
            pass

    @rule(data=st.data(), text=st.text(max_size=20))
    def annotate(self, data, text):
        if not self.cards:
            return
        self.store.set_annotation(self.project_id, self.pick(data), text)

    @rule(data=st.data())
    def delete(self, data):
        if not self.cards:
            return
        card_id = self.pick(data)
        self.store.delete_card(self.project_id, card_id)
        alive = set(self.store.cards(self.project_id))
        self.cards = [cid for cid in self.cards if cid in alive]

    @invariant()
    def tree_is_consistent(self):
        assert check_tree_invariants(self.store, self.project_id) == []

    def teardown(self):
        twin = CardStore(
            assets=self.store.assets, clock=FakeClock(), id_factory=sequential_ids("t")
        )
        twin.replay_journal(self.store.journal_records(self.project_id))
        assert twin.export_bytes(self.project_id) == self.store.export_bytes(
            self.project_id
        )


TestStoreMachine = StoreMachine.TestCase
TestStoreMachine.settings = settings(max_examples=25, stateful_step_count=30, deadline=None)

"""Structural metrics over projects and corpora.

Word counts split on whitespace runs; a card counts as annotated when its
annotation is non-empty after trimming. Depth counts root cards as 1, so a
project "has hierarchy" exactly when max_depth is at least 2 and is "deeper
than 2 levels" exactly when max_depth is at least 3. Means and standard
errors are computed in exact rational arithmetic and converted to floats at
the end; standard error is the sample standard deviation over sqrt(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .model import Card, CardKind
from .store import CardStore

#: Projects need at least this many non-folder cards to enter corpus aggregates.
ELIGIBILITY_MIN_CONTENT_CARDS = 3

POSITIONS = ("root", "internal", "leaf")


def word_count(text: str) -> int:
    return len(text.split())


def is_annotated(card: Card) -> bool:
    return bool(card.annotation.strip())


@dataclass
class ProjectStats:
    card_count: int
    counts_by_kind: dict[str, int]
    max_depth: int
    has_hierarchy: bool
    annotated_fraction: float
    annotation_word_lengths: dict[str, list[int]]
    folder_parent_count: int
    container_parent_count: int
    annotated_by_position: dict[str, dict[str, int]]

    @property
    def non_folder_card_count(self) -> int:
        return self.card_count - self.counts_by_kind[CardKind.FOLDER.value]

    @property
    def eligible(self) -> bool:
        return self.non_folder_card_count >= ELIGIBILITY_MIN_CONTENT_CARDS

    def to_dict(self) -> dict:
        return {
            "card_count": self.card_count,
            "counts_by_kind": dict(self.counts_by_kind),
            "max_depth": self.max_depth,
            "has_hierarchy": self.has_hierarchy,
            "annotated_fraction": self.annotated_fraction,
            "annotation_word_lengths": {
                kind: list(lengths) for kind, lengths in self.annotation_word_lengths.items()
            },
            "folder_parent_count": self.folder_parent_count,
            "container_parent_count": self.container_parent_count,
            "annotated_by_position": {
                pos: dict(cell) for pos, cell in self.annotated_by_position.items()
            },
            "annotation_rate_by_position": {
                pos: _ratio(cell["annotated"], cell["count"])
                for pos, cell in self.annotated_by_position.items()
            },
            "eligible": self.eligible,
        }


@dataclass
class CorpusReport:
    project_count: int
    eligible_project_count: int
    fraction_with_hierarchy: float
    fraction_depth_gt2: float
    fraction_parents_folder: float
    fraction_parents_container: float
    annotation_stats: dict[str, dict]
    annotation_rate_by_position: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "project_count": self.project_count,
            "eligible_project_count": self.eligible_project_count,
            "fraction_with_hierarchy": self.fraction_with_hierarchy,
            "fraction_depth_gt2": self.fraction_depth_gt2,
            "fraction_parents_folder": self.fraction_parents_folder,
            "fraction_parents_container": self.fraction_parents_container,
            "annotation_stats": {k: dict(v) for k, v in self.annotation_stats.items()},
            "annotation_rate_by_position": dict(self.annotation_rate_by_position),
        }


def _ratio(numerator: int, denominator: int) -> float:
    if denominator == 0:
        return 0.0
    return float(Fraction(numerator, denominator))


def _position(card: Card, has_children: bool) -> str:
    if card.parent_id is None:
        return "root"
    return "internal" if has_children else "leaf"


def stats_from_cards(cards: list[Card]) -> ProjectStats:
    by_id = {card.id: card for card in cards}
    child_counts: dict[str, int] = {}
    for card in cards:
        if card.parent_id is not None:
            child_counts[card.parent_id] = child_counts.get(card.parent_id, 0) + 1

    counts_by_kind = {kind.value: 0 for kind in CardKind}
    word_lengths: dict[str, list[int]] = {kind.value: [] for kind in CardKind}
    annotated_total = 0
    max_depth = 0
    folder_parents = 0
    container_parents = 0
    by_position = {pos: {"count": 0, "annotated": 0} for pos in POSITIONS}

    depth_cache: dict[str, int] = {}

    def depth_of(card_id: str) -> int:
        chain = []
        cursor: str | None = card_id
        while cursor is not None and cursor not in depth_cache:
            chain.append(cursor)
            cursor = by_id[cursor].parent_id
        base = 0 if cursor is None else depth_cache[cursor]
        for cid in reversed(chain):
            base += 1
            depth_cache[cid] = base
        return depth_cache[card_id]

    for card in cards:
        counts_by_kind[card.kind.value] += 1
        max_depth = max(max_depth, depth_of(card.id))
        children = child_counts.get(card.id, 0)
        if children > 0:
            if card.kind is CardKind.FOLDER:
                folder_parents += 1
            else:
                container_parents += 1
        position = _position(card, children > 0)
        by_position[position]["count"] += 1
        if is_annotated(card):
            annotated_total += 1
            by_position[position]["annotated"] += 1
            word_lengths[card.kind.value].append(word_count(card.annotation))

    return ProjectStats(
        card_count=len(cards),
        counts_by_kind=counts_by_kind,
        max_depth=max_depth,
        has_hierarchy=max_depth >= 2,
        annotated_fraction=_ratio(annotated_total, len(cards)),
        annotation_word_lengths=word_lengths,
        folder_parent_count=folder_parents,
        container_parent_count=container_parents,
        annotated_by_position=by_position,
    )


def project_stats(store: CardStore, project_id: str) -> ProjectStats:
    return stats_from_cards(list(store.cards(project_id).values()))


def stats_from_snapshot(snapshot: dict) -> ProjectStats:
    project_id = snapshot["project"]["id"]
    cards = [Card.from_dict(doc, project_id) for doc in snapshot["cards"]]
    return stats_from_cards(cards)


def _mean_and_se(lengths: list[int]) -> tuple[float, float]:
    n = len(lengths)
    if n == 0:
        return 0.0, 0.0
    mean = Fraction(sum(lengths), n)
    if n < 2:
        return float(mean), 0.0
    variance = sum((Fraction(x) - mean) ** 2 for x in lengths) / (n - 1)
    return float(mean), math.sqrt(variance / n)


def corpus_report(projects: list[ProjectStats]) -> CorpusReport:
    eligible = [p for p in projects if p.eligible]
    hierarchy = sum(1 for p in eligible if p.has_hierarchy)
    deep = sum(1 for p in eligible if p.max_depth >= 3)
    folder_parents = sum(p.folder_parent_count for p in eligible)
    container_parents = sum(p.container_parent_count for p in eligible)
    all_parents = folder_parents + container_parents

    annotation_stats = {}
    for kind in CardKind:
        pooled: list[int] = []
        for p in eligible:
            pooled.extend(p.annotation_word_lengths[kind.value])
        mean, se = _mean_and_se(pooled)
        annotation_stats[kind.value] = {
            "count": len(pooled),
            "mean_words": mean,
            "standard_error": se,
        }

    position_rates = {}
    for pos in POSITIONS:
        count = sum(p.annotated_by_position[pos]["count"] for p in eligible)
        annotated = sum(p.annotated_by_position[pos]["annotated"] for p in eligible)
        position_rates[pos] = _ratio(annotated, count)

    return CorpusReport(
        project_count=len(projects),
        eligible_project_count=len(eligible),
        fraction_with_hierarchy=_ratio(hierarchy, len(eligible)),
        fraction_depth_gt2=_ratio(deep, len(eligible)),
        fraction_parents_folder=_ratio(folder_parents, all_parents),
        fraction_parents_container=_ratio(container_parents, all_parents),
        annotation_stats=annotation_stats,
        annotation_rate_by_position=position_rates,
    )


def annotation_table_csv(report: CorpusReport) -> str:
    """The annotation-length table as CSV: one row per card kind."""
    lines = ["kind,annotated_count,mean_words,standard_error"]
    for kind in CardKind:
        cell = report.annotation_stats[kind.value]
        lines.append(
            f"{kind.value},{cell['count']},{cell['mean_words']!r},{cell['standard_error']!r}"
        )
    return "\n".join(lines) + "\n"

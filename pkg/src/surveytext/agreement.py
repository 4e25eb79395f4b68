"""Sentiment-label agreement: chance-corrected rater agreement and
classifier scoring against a majority-vote ground truth.

An automatic labeller is treated as just another rater read from a file;
nothing here knows about models. The pipeline order used by the command
line is: drop whole questions that are mostly neutral, drop answers any
human rated neutral, compute agreement, then score the automatic rater
against the majority of the human ones.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ComputationError, DataError


@dataclass(frozen=True)
class RatingMatrix:
    """Per-item label counts from a fixed panel of raters.

    ``counts[i][j]`` is the number of raters that gave item ``items[i]``
    the label ``labels[j]``; every row sums to ``n_raters``.
    """

    items: tuple[str, ...]
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    n_raters: int

    def __post_init__(self) -> None:
        if self.n_raters < 2:
            raise DataError("a rating matrix needs at least 2 raters")
        for item, row in zip(self.items, self.counts):
            if len(row) != len(self.labels):
                raise DataError(f"item {item!r}: count row does not match label set")
            if sum(row) != self.n_raters:
                raise DataError(
                    f"item {item!r}: counts sum to {sum(row)}, expected {self.n_raters}"
                )

    @classmethod
    def from_ratings(
        cls,
        ratings: Mapping[str, Mapping[str, str]],
        items: Sequence[str],
        labels: Sequence[str],
    ) -> "RatingMatrix":
        """Build the matrix from per-rater ``{item: label}`` maps."""
        label_index = {label: j for j, label in enumerate(labels)}
        rows = []
        for item in items:
            row = [0] * len(labels)
            for rater, assignments in ratings.items():
                if item not in assignments:
                    raise DataError(f"rater {rater!r} has no rating for item {item!r}")
                label = assignments[item]
                if label not in label_index:
                    raise DataError(f"label {label!r} (rater {rater!r}, item {item!r}) "
                                    f"is outside the declared label set")
                row[label_index[label]] += 1
            rows.append(tuple(row))
        return cls(
            items=tuple(items),
            labels=tuple(labels),
            counts=tuple(rows),
            n_raters=len(ratings),
        )


def fleiss_kappa(matrix: RatingMatrix) -> float:
    """Chance-corrected agreement for a fixed number of raters.

    Per-item agreement is the fraction of concordant rater pairs,
    (sum_j n_ij^2 - n) / (n (n - 1)); expected agreement is the sum of
    squared marginal label shares. Unanimity on every item returns
    exactly 1.0, which also covers the degenerate case where a single
    label absorbs all ratings and the chance term reaches 1.
    """
    n_items = len(matrix.items)
    if n_items < 2:
        raise ComputationError("Fleiss' kappa needs at least 2 items")
    n = matrix.n_raters
    per_item = [
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in matrix.counts
    ]
    observed = sum(per_item) / n_items
    total = n_items * n
    marginals = [sum(row[j] for row in matrix.counts) / total for j in range(len(matrix.labels))]
    expected = sum(p * p for p in marginals)
    if observed == 1.0:
        return 1.0
    if expected == 1.0:
        raise ComputationError("degenerate chance agreement without perfect agreement")
    return (observed - expected) / (1.0 - expected)


def perfect_agreement_count(matrix: RatingMatrix) -> int:
    """Number of items on which every rater chose the same label."""
    return sum(1 for row in matrix.counts if max(row) == matrix.n_raters)


def neutral_filter(
    ratings: Mapping[str, Mapping[str, str]],
    items: Sequence[str],
    raters: Sequence[str] | None = None,
    neutral_label: str = "neutral",
) -> tuple[list[str], list[str]]:
    """Split items into (kept, dropped): dropped when any designated rater
    rated them neutral. Order is preserved on both sides."""
    use = list(raters) if raters is not None else list(ratings)
    kept: list[str] = []
    dropped: list[str] = []
    for item in items:
        labels = []
        for rater in use:
            if item not in ratings[rater]:
                raise DataError(f"rater {rater!r} has no rating for item {item!r}")
            labels.append(ratings[rater][item])
        (dropped if neutral_label in labels else kept).append(item)
    return kept, dropped


def question_neutral_exclusion(
    ratings_by_question: Mapping[str, Sequence[Sequence[str]]],
    threshold_pct: float = 50.0,
    neutral_label: str = "neutral",
    mode: str = "majority",
) -> list[str]:
    """Questions whose answers are predominantly neutral.

    ``ratings_by_question`` maps a question id to, per answer, the list
    of labels it received. An answer counts as neutral when a strict
    majority of its raters chose neutral (``mode="majority"``) or when
    any rater did (``mode="any"``). A question is excluded when its
    neutral-answer percentage strictly exceeds the threshold.
    """
    if mode not in ("majority", "any"):
        raise DataError(f"unknown neutral aggregation mode {mode!r}")
    excluded = []
    for question, answer_labels in ratings_by_question.items():
        if not answer_labels:
            continue
        neutral = 0
        for labels in answer_labels:
            n_neutral = sum(1 for lab in labels if lab == neutral_label)
            if mode == "majority":
                neutral += n_neutral * 2 > len(labels)
            else:
                neutral += n_neutral > 0
        if 100.0 * neutral / len(answer_labels) > threshold_pct:
            excluded.append(question)
    return excluded


def majority_gold(matrix: RatingMatrix) -> tuple[dict[str, str], list[str]]:
    """Per-item gold label by strict plurality.

    Returns the gold map plus the items excluded because their top count
    was tied; ties are reported, never broken arbitrarily.
    """
    gold: dict[str, str] = {}
    ties: list[str] = []
    for item, row in zip(matrix.items, matrix.counts):
        best = max(row)
        winners = [j for j, c in enumerate(row) if c == best]
        if len(winners) > 1:
            ties.append(item)
        else:
            gold[item] = matrix.labels[winners[0]]
    return gold, ties


def prf(
    gold: Mapping[str, str], predicted: Mapping[str, str], label: str
) -> tuple[float | None, float | None, float | None]:
    """One-vs-rest precision, recall and F1 for a single label.

    Undefined ratios (no predictions, or no gold occurrences, of the
    label) are returned as None, and F1 is None whenever either
    component is. P = R = 0 gives F1 = 0.
    """
    if set(gold) != set(predicted):
        raise DataError("gold and predicted label maps cover different items")
    tp = sum(1 for item in gold if gold[item] == label and predicted[item] == label)
    fp = sum(1 for item in gold if gold[item] != label and predicted[item] == label)
    fn = sum(1 for item in gold if gold[item] == label and predicted[item] != label)
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    if precision is None or recall is None:
        f1 = None
    elif precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def confusion_counts(
    gold: Mapping[str, str], predicted: Mapping[str, str]
) -> dict[tuple[str, str], int]:
    """(gold label, predicted label) -> count, over the shared item set."""
    if set(gold) != set(predicted):
        raise DataError("gold and predicted label maps cover different items")
    counter: Counter[tuple[str, str]] = Counter()
    for item in gold:
        counter[(gold[item], predicted[item])] += 1
    return dict(counter)


@dataclass(frozen=True)
class AgreementReport:
    """Agreement of a rater panel plus, optionally, the scoring of one
    designated automatic rater against the panel's majority vote."""

    kappa: float
    perfect_agreement_count: int
    n_items: int
    kappa_with_machine: float | None = None
    perfect_agreement_with_machine: int | None = None
    per_label_prf: tuple[tuple[str, float | None, float | None, float | None], ...] = ()
    confusion: tuple[tuple[str, str, int], ...] = ()
    gold_ties: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.perfect_agreement_count > self.n_items:
            raise DataError("perfect agreement count cannot exceed the item count")
        for label, p, r, f1 in self.per_label_prf:
            if p is not None and r is not None and f1 is not None and p + r > 0:
                expected = 2 * p * r / (p + r)
                if abs(f1 - expected) > 1e-9:
                    raise DataError(f"label {label!r}: F1 is not the harmonic mean")


def evaluate_panel(
    ratings: Mapping[str, Mapping[str, str]],
    items: Sequence[str],
    label_set: Sequence[str],
    machine_rater: str | None = None,
    neutral_label: str = "neutral",
) -> AgreementReport:
    """Full agreement evaluation over already-filtered items.

    Kappa is computed over the human panel, then jointly over humans
    plus the machine rater (one panel, not machine-vs-gold). The machine
    is scored per non-neutral label against the humans' majority vote;
    tied items are excluded from the gold and reported.
    """
    humans = {r: marks for r, marks in ratings.items() if r != machine_rater}
    if len(humans) < 2:
        raise DataError("need at least 2 human raters")
    human_matrix = RatingMatrix.from_ratings(humans, items, label_set)
    gold, ties = majority_gold(human_matrix)

    kappa_all = perfect_all = None
    prf_rows: list[tuple[str, float | None, float | None, float | None]] = []
    confusion: tuple[tuple[str, str, int], ...] = ()
    if machine_rater is not None:
        if machine_rater not in ratings:
            raise DataError(f"designated machine rater {machine_rater!r} not in ratings")
        joint_matrix = RatingMatrix.from_ratings(ratings, items, label_set)
        kappa_all = fleiss_kappa(joint_matrix)
        perfect_all = perfect_agreement_count(joint_matrix)
        predicted = {item: ratings[machine_rater][item] for item in gold}
        for label in label_set:
            if label == neutral_label:
                continue
            prf_rows.append((label, *prf(gold, predicted, label)))
        confusion = tuple(
            (g, p, count)
            for (g, p), count in sorted(confusion_counts(gold, predicted).items())
        )

    return AgreementReport(
        kappa=fleiss_kappa(human_matrix),
        perfect_agreement_count=perfect_agreement_count(human_matrix),
        n_items=len(items),
        kappa_with_machine=kappa_all,
        perfect_agreement_with_machine=perfect_all,
        per_label_prf=tuple(prf_rows),
        confusion=confusion,
        gold_ties=tuple(ties),
    )

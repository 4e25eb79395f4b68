"""Comparing two topic models over the same answers.

Topics are compared by rank-correlating their top-100 term rankings:
the union of both term lists is ranked within each list, with all words
absent from a list sharing that list's average leftover rank. Pairs
passing a conservative correlation-and-significance threshold count as
similar, a greedy one-to-one matching turns pair hits into a topic
count, and answer-level agreement is the share of answers that land in
a matched topic pair on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import betainc

from .errors import ComputationError, DataError
from .hashing import SplitMix64
from .topics import TopicModel

DEFAULT_RHO_THRESHOLD = 0.7
DEFAULT_P_THRESHOLD = 0.05


def _rank_over_union(words: Sequence[str], union: Sequence[str]) -> list[float]:
    position = {word: i + 1 for i, word in enumerate(words)}
    n_present = len(words)
    n_absent = len(union) - n_present
    absent_rank = (n_present + 1 + n_present + n_absent) / 2.0
    return [float(position.get(word, absent_rank)) for word in union]


def _pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    var_x = sum((x - mean_x) ** 2 for x in xs)
    var_y = sum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise ComputationError("rank correlation undefined: a rank vector is constant")
    return cov / math.sqrt(var_x * var_y)


def _t_test_p(rho: float, n: int) -> float:
    """Two-sided p for a correlation of rho over n points, via Student's t.

    p = I_x(df/2, 1/2) with x = df / (df + t^2), the regularized
    incomplete beta form of the t survival function.
    """
    df = n - 2
    t_sq = rho * rho * df / (1.0 - rho * rho)
    return float(betainc(df / 2.0, 0.5, df / (df + t_sq)))


def spearman_top_words(
    words_a: Sequence[str],
    words_b: Sequence[str],
    mode: str = "union",
) -> tuple[float, float | None, int]:
    """Spearman's rho between two ranked word lists, with a p-value.

    Union mode ranks every word of either list as described in the
    module docstring; ties are handled by construction because rho is
    the Pearson correlation of the rank vectors. Intersection mode
    correlates only shared words by their original ranks (a sensitivity
    check, not the default). Identical lists give exactly (1.0, 0.0);
    a union smaller than 4 words has no defined p-value.
    """
    if not words_a or not words_b:
        raise DataError("cannot correlate an empty word list")
    if mode not in ("union", "intersection"):
        raise DataError(f"unknown rank correlation mode {mode!r}")

    if list(words_a) == list(words_b):
        return 1.0, 0.0, len(words_a)

    if mode == "union":
        union = list(words_a) + [w for w in words_b if w not in set(words_a)]
        ranks_a = _rank_over_union(words_a, union)
        ranks_b = _rank_over_union(words_b, union)
        n = len(union)
    else:
        common = [w for w in words_a if w in set(words_b)]
        if len(common) < 2:
            raise ComputationError("fewer than 2 shared words; correlation undefined")
        pos_b = {w: i + 1 for i, w in enumerate(words_b)}
        pos_a = {w: i + 1 for i, w in enumerate(words_a)}
        ranks_a = [float(pos_a[w]) for w in common]
        ranks_b = [float(pos_b[w]) for w in common]
        n = len(common)

    rho = _pearson(ranks_a, ranks_b)
    if abs(rho) >= 1.0 - 1e-12:
        return rho, 0.0, n
    if n < 4:
        return rho, None, n
    return rho, _t_test_p(rho, n), n


def spearman_permutation_p(
    words_a: Sequence[str],
    words_b: Sequence[str],
    permutations: int = 10_000,
    seed: int = 0,
) -> float:
    """Exact-style permutation p-value for small unions.

    Shuffles one rank vector with a seeded deterministic stream and
    counts permutations whose |rho| reaches the observed one;
    p = (hits + 1) / (permutations + 1).
    """
    rho_obs, _, _ = spearman_top_words(words_a, words_b)
    union = list(words_a) + [w for w in words_b if w not in set(words_a)]
    ranks_a = _rank_over_union(words_a, union)
    ranks_b = _rank_over_union(words_b, union)
    rng = SplitMix64(seed)
    hits = 0
    shuffled = list(ranks_b)
    for _ in range(permutations):
        for i in range(len(shuffled) - 1, 0, -1):
            j = rng.next_index(i + 1)
            shuffled[i], shuffled[j] = shuffled[j], shuffled[i]
        if abs(_pearson(ranks_a, shuffled)) >= abs(rho_obs) - 1e-12:
            hits += 1
    return (hits + 1) / (permutations + 1)


def classify_pair(
    rho: float | None,
    p: float | None,
    rho_threshold: float = DEFAULT_RHO_THRESHOLD,
    p_threshold: float = DEFAULT_P_THRESHOLD,
) -> bool:
    """Similar iff rho >= rho_threshold and p < p_threshold (both strict
    on the p side; an undefined p never passes)."""
    return rho is not None and p is not None and rho >= rho_threshold and p < p_threshold


@dataclass(frozen=True)
class PairScore:
    topic_a: int
    topic_b: int
    rho: float
    p: float | None
    n_union: int
    similar: bool


@dataclass(frozen=True)
class TopicMatchReport:
    """All pair scores plus the one-to-one matching and text-level share."""

    pairs: tuple[PairScore, ...]
    matched: tuple[tuple[int, int], ...]
    n_topics_a: int
    n_topics_b: int
    n_similar: int
    n_similar_pairs_raw: int
    pct_texts_similar: float
    pct_texts_similar_nonoutlier: float | None
    n_comparison_answers: int
    unmatched_a: tuple[int, ...]
    unmatched_b: tuple[int, ...]
    rho_threshold: float
    p_threshold: float


def match_models(
    model_a: TopicModel,
    model_b: TopicModel,
    rho_threshold: float = DEFAULT_RHO_THRESHOLD,
    p_threshold: float = DEFAULT_P_THRESHOLD,
    comparison_ids: Sequence[str] | None = None,
    top_n: int = 100,
    mode: str = "union",
) -> TopicMatchReport:
    """Score all cross-model topic pairs and match them one to one.

    Pairs passing the similarity threshold are matched greedily in
    descending rho (ties by topic id pair), so no topic is counted
    twice. The text-level percentage is over ``comparison_ids`` (default:
    answers known to both models); an answer counts as similar only when
    both models put it into topics that form one matched pair, so
    outliers on either side never count.
    """
    if not model_a.topics or not model_b.topics:
        raise ComputationError("cannot compare a topic model without topics")

    pairs: list[PairScore] = []
    for topic_a in model_a.topics:
        words_a = topic_a.top_terms(top_n)
        for topic_b in model_b.topics:
            rho, p, n_union = spearman_top_words(words_a, topic_b.top_terms(top_n), mode=mode)
            pairs.append(
                PairScore(
                    topic_a=topic_a.topic_id,
                    topic_b=topic_b.topic_id,
                    rho=rho,
                    p=p,
                    n_union=n_union,
                    similar=classify_pair(rho, p, rho_threshold, p_threshold),
                )
            )

    candidates = sorted(
        (pair for pair in pairs if pair.similar),
        key=lambda pair: (-pair.rho, pair.topic_a, pair.topic_b),
    )
    matched: list[tuple[int, int]] = []
    used_a: set[int] = set()
    used_b: set[int] = set()
    for pair in candidates:
        if pair.topic_a in used_a or pair.topic_b in used_b:
            continue
        matched.append((pair.topic_a, pair.topic_b))
        used_a.add(pair.topic_a)
        used_b.add(pair.topic_b)

    membership_a = model_a.membership()
    membership_b = model_b.membership()
    if comparison_ids is None:
        universe = set(membership_a) & set(membership_b)
    else:
        universe = set(comparison_ids)
    if not universe:
        raise ComputationError("no answers to compare the models on")

    matched_set = set(matched)
    similar_answers = 0
    nonoutlier_answers = 0
    for id_ in universe:
        label_a = membership_a.get(id_, -1)
        label_b = membership_b.get(id_, -1)
        if label_a != -1 and label_b != -1:
            nonoutlier_answers += 1
            if (label_a, label_b) in matched_set:
                similar_answers += 1

    return TopicMatchReport(
        pairs=tuple(pairs),
        matched=tuple(matched),
        n_topics_a=model_a.n_topics,
        n_topics_b=model_b.n_topics,
        n_similar=len(matched),
        n_similar_pairs_raw=sum(1 for pair in pairs if pair.similar),
        pct_texts_similar=100.0 * similar_answers / len(universe),
        pct_texts_similar_nonoutlier=(
            100.0 * similar_answers / nonoutlier_answers if nonoutlier_answers else None
        ),
        n_comparison_answers=len(universe),
        unmatched_a=tuple(t.topic_id for t in model_a.topics if t.topic_id not in used_a),
        unmatched_b=tuple(t.topic_id for t in model_b.topics if t.topic_id not in used_b),
        rho_threshold=rho_threshold,
        p_threshold=p_threshold,
    )

"""Turning clusterings into topics and picking the best clustering size.

Each cluster's answers are concatenated into one document and scored
with a cluster-level TF-IDF, giving a ranked term list per topic. Topic
quality is the u_mass coherence of the top terms, counted over the
individual answers as reference documents. The sweep reruns clustering
over a range of minimum cluster sizes and keeps the size with the best
coherence that still yields more than one topic.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .corpus import TokenizedAnswer
from .density_cluster import ClusterResult, hdbscan
from .embeddings import EmbeddingMatrix
from .errors import ComputationError, DataError

TFIDF_VARIANTS = ("cluster", "plain")


@dataclass(frozen=True)
class Topic:
    topic_id: int
    terms: tuple[tuple[str, float], ...]  # (term, score), best first
    member_ids: tuple[str, ...]

    def top_terms(self, k: int) -> tuple[str, ...]:
        return tuple(term for term, _ in self.terms[:k])


@dataclass(frozen=True)
class TopicModel:
    topics: tuple[Topic, ...]
    min_cluster_size: int
    m_total_answers: int
    outlier_ids: tuple[str, ...]
    coherence_umass: float | None = None

    @property
    def n_topics(self) -> int:
        return len(self.topics)

    @property
    def answer_ids(self) -> tuple[str, ...]:
        ids: list[str] = []
        for topic in self.topics:
            ids.extend(topic.member_ids)
        ids.extend(self.outlier_ids)
        return tuple(ids)

    def membership(self) -> dict[str, int]:
        """Answer id -> topic id; outliers map to -1."""
        assigned = {id_: -1 for id_ in self.outlier_ids}
        for topic in self.topics:
            for id_ in topic.member_ids:
                assigned[id_] = topic.topic_id
        return assigned


def cluster_tfidf(
    answers: Sequence[TokenizedAnswer],
    clusters: ClusterResult,
    variant: str = "cluster",
    terms_per_topic: int = 100,
) -> TopicModel:
    """Rank terms per cluster by treating each cluster as one document.

    The default variant scores term t in cluster c as
    (f_tc / W_c) * ln(1 + m / f_t): term frequency normalized by the
    cluster's token count, dampened by how often the term occurs across
    all clustered answers, with m the total number of answers in the
    dataset (outliers included). The "plain" variant uses the classic
    ln(n_clusters / df) inverse document frequency over cluster
    documents instead. Ties in score break lexicographically.
    """
    if variant not in TFIDF_VARIANTS:
        raise DataError(f"unknown tf-idf variant {variant!r}")
    if len(answers) != len(clusters.labels):
        raise DataError(
            f"{len(answers)} answers do not match {len(clusters.labels)} cluster labels"
        )
    if not answers:
        raise ComputationError("cannot build topics from an empty answer set")
    if clusters.n_clusters < 1:
        raise ComputationError("no clusters to build topics from (everything is an outlier)")

    m_total = len(answers)
    cluster_ids = sorted(set(clusters.labels) - {-1})
    cluster_tokens: dict[int, Counter[str]] = {c: Counter() for c in cluster_ids}
    members: dict[int, list[str]] = {c: [] for c in cluster_ids}
    outliers: list[str] = []
    for answer, label in zip(answers, clusters.labels):
        if label == -1:
            outliers.append(answer.response_id)
            continue
        cluster_tokens[label].update(answer.tokens)
        members[label].append(answer.response_id)

    corpus_freq: Counter[str] = Counter()
    doc_freq: Counter[str] = Counter()
    for counts in cluster_tokens.values():
        corpus_freq.update(counts)
        doc_freq.update(counts.keys())

    topics: list[Topic] = []
    for c in cluster_ids:
        counts = cluster_tokens[c]
        total = sum(counts.values())
        if total == 0:
            raise ComputationError(f"cluster {c} has an empty document")
        scored: list[tuple[str, float]] = []
        for term, f_tc in counts.items():
            tf = f_tc / total
            if variant == "cluster":
                idf = math.log(1.0 + m_total / corpus_freq[term])
            else:
                idf = math.log(len(cluster_ids) / doc_freq[term])
            scored.append((term, tf * idf))
        scored.sort(key=lambda kv: (-kv[1], kv[0]))
        topics.append(
            Topic(topic_id=c, terms=tuple(scored[:terms_per_topic]), member_ids=tuple(members[c]))
        )

    return TopicModel(
        topics=tuple(topics),
        min_cluster_size=clusters.min_cluster_size,
        m_total_answers=m_total,
        outlier_ids=tuple(outliers),
    )


def top_words(model: TopicModel, k: int) -> dict[int, tuple[str, ...]]:
    """First k words of every topic, in score order."""
    if k < 1:
        raise DataError(f"k must be at least 1, got {k}")
    return {topic.topic_id: topic.top_terms(k) for topic in model.topics}


@dataclass(frozen=True)
class CoherenceResult:
    """u_mass score plus what had to be skipped to compute it."""

    score: float
    per_topic: tuple[tuple[int, float | None, int], ...]  # (topic_id, score, evaluated pairs)
    skipped_pairs: int
    skipped_topics: tuple[int, ...]


def umass_coherence(
    model: TopicModel,
    documents: Sequence[TokenizedAnswer] | Sequence[Sequence[str]],
    top_n: int = 20,
) -> CoherenceResult:
    """u_mass coherence of each topic's top words over reference documents.

    For ordered top words w_1..w_N every pair (w_i, w_j) with j < i
    scores ln((D(w_i, w_j) + 1) / D(w_j)), where D counts documents
    containing the word(s). Pairs whose conditioning word never occurs
    are skipped and tallied; a topic with no scoreable pair is skipped
    and reported. Topic score is the mean over its evaluated pairs, the
    model score the mean over its scored topics.
    """
    if not model.topics:
        raise ComputationError("coherence of a model without topics is undefined")
    doc_sets = [
        frozenset(doc.tokens if isinstance(doc, TokenizedAnswer) else doc) for doc in documents
    ]
    doc_freq: Counter[str] = Counter()
    for tokens in doc_sets:
        doc_freq.update(tokens)

    def co_doc_freq(a: str, b: str) -> int:
        return sum(1 for tokens in doc_sets if a in tokens and b in tokens)

    per_topic: list[tuple[int, float | None, int]] = []
    skipped_pairs = 0
    skipped_topics: list[int] = []
    for topic in model.topics:
        words = topic.top_terms(top_n)
        pair_scores: list[float] = []
        for i in range(1, len(words)):
            for j in range(i):
                if doc_freq[words[j]] == 0:
                    skipped_pairs += 1
                    continue
                pair_scores.append(
                    math.log((co_doc_freq(words[i], words[j]) + 1) / doc_freq[words[j]])
                )
        if pair_scores:
            per_topic.append((topic.topic_id, sum(pair_scores) / len(pair_scores), len(pair_scores)))
        else:
            per_topic.append((topic.topic_id, None, 0))
            skipped_topics.append(topic.topic_id)

    scored = [score for _, score, _ in per_topic if score is not None]
    if not scored:
        raise ComputationError("no topic had a scoreable word pair; coherence undefined")
    return CoherenceResult(
        score=sum(scored) / len(scored),
        per_topic=tuple(per_topic),
        skipped_pairs=skipped_pairs,
        skipped_topics=tuple(skipped_topics),
    )


@dataclass(frozen=True)
class CoherenceSweep:
    """One row per candidate minimum cluster size, in ascending size order."""

    evaluated: tuple[tuple[int, int, float | None], ...]  # (size, n_topics, coherence)
    selected: int


def sweep(
    answers: Sequence[TokenizedAnswer],
    vectors: EmbeddingMatrix,
    sizes: Iterable[int] = range(2, 51),
    min_samples: int | None = None,
    tfidf_variant: str = "cluster",
    coherence_top_n: int = 20,
    coherence_reference: str = "answers",
    workers: int = 1,
) -> tuple[CoherenceSweep, TopicModel]:
    """Evaluate every candidate minimum cluster size and keep the best.

    A candidate that yields at most one topic (or none at all) is
    recorded with coherence None and cannot be selected. Among the rest
    the numerically largest u_mass wins; ties go to the smallest size.
    Candidate evaluations are independent, so ``workers`` may fan them
    out; the sweep record lists candidates in ascending size order and
    is byte-identical however they were scheduled.
    """
    size_list = sorted(set(int(s) for s in sizes))
    if not size_list:
        raise DataError("empty sweep range")
    if size_list[0] < 2:
        raise DataError("minimum cluster sizes below 2 are not meaningful")
    if coherence_reference not in ("answers", "clusters"):
        raise DataError(f"unknown coherence reference {coherence_reference!r}")

    def evaluate(size: int) -> tuple[int, int, float | None, TopicModel | None]:
        try:
            clusters = hdbscan(vectors, min_cluster_size=size, min_samples=min_samples)
        except DataError:
            return size, 0, None, None
        if clusters.n_clusters <= 1:
            return size, clusters.n_clusters, None, None
        model = cluster_tfidf(answers, clusters, variant=tfidf_variant)
        if coherence_reference == "answers":
            reference: Sequence = answers
        else:
            reference = [
                [tok for ans, lab in zip(answers, clusters.labels)
                 if lab == topic.topic_id for tok in ans.tokens]
                for topic in model.topics
            ]
        try:
            coherence = umass_coherence(model, reference, top_n=coherence_top_n)
        except ComputationError:
            return size, clusters.n_clusters, None, None
        return size, clusters.n_clusters, coherence.score, replace(model, coherence_umass=coherence.score)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, size_list))
    else:
        outcomes = [evaluate(size) for size in size_list]

    evaluated = tuple((size, n_topics, coherence) for size, n_topics, coherence, _ in outcomes)
    best: tuple[float, int] | None = None
    best_model: TopicModel | None = None
    for size, n_topics, coherence, model in outcomes:
        if n_topics <= 1 or coherence is None:
            continue
        if best is None or coherence > best[0]:
            best = (coherence, size)
            best_model = model
    if best is None or best_model is None:
        raise ComputationError(
            "no candidate minimum cluster size produced more than one topic"
        )
    return CoherenceSweep(evaluated=evaluated, selected=best[1]), best_model


def model_to_dict(model: TopicModel) -> dict:
    """JSON-ready representation of a topic model."""
    return {
        "min_cluster_size": model.min_cluster_size,
        "m_total_answers": model.m_total_answers,
        "coherence_umass": model.coherence_umass,
        "outlier_ids": list(model.outlier_ids),
        "topics": [
            {
                "topic_id": topic.topic_id,
                "terms": [[term, score] for term, score in topic.terms],
                "member_ids": list(topic.member_ids),
            }
            for topic in model.topics
        ],
    }


def model_from_dict(payload: dict) -> TopicModel:
    try:
        topics = tuple(
            Topic(
                topic_id=int(entry["topic_id"]),
                terms=tuple((str(t), float(s)) for t, s in entry["terms"]),
                member_ids=tuple(str(i) for i in entry["member_ids"]),
            )
            for entry in payload["topics"]
        )
        return TopicModel(
            topics=topics,
            min_cluster_size=int(payload["min_cluster_size"]),
            m_total_answers=int(payload["m_total_answers"]),
            outlier_ids=tuple(str(i) for i in payload["outlier_ids"]),
            coherence_umass=payload.get("coherence_umass"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed topic model payload: {exc}") from exc

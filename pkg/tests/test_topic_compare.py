from __future__ import annotations

import random

import pytest

from conftest import PLANTED_MIN_SAMPLES
from oracles import classical_spearman
from surveytext.corpus import NoiseSpec, inject_noise
from surveytext.embeddings import hash_embed_matrix
from surveytext.errors import ComputationError, DataError
from surveytext.topic_compare import (
    classify_pair,
    match_models,
    spearman_permutation_p,
    spearman_top_words,
)
from surveytext.topics import Topic, TopicModel, sweep


def toy_model(*specs):
    """specs: (terms, member_ids) per topic."""
    topics = tuple(
        Topic(
            topic_id=i,
            terms=tuple((t, 1.0 / (k + 1)) for k, t in enumerate(terms)),
            member_ids=tuple(members),
        )
        for i, (terms, members) in enumerate(specs)
    )
    return TopicModel(topics=topics, min_cluster_size=2,
                      m_total_answers=sum(len(m) for _, m in specs), outlier_ids=())


# --- Spearman over ranked word lists ------------------------------------------


def test_identical_lists_exactly_one():
    for length in (1, 2, 5, 100):
        words = [f"w{i}" for i in range(length)]
        rho, p, n = spearman_top_words(words, list(words))
        assert rho == 1.0 and p == 0.0 and n == length


def test_hand_case_four_words():
    # ranks (1,2,3,4) vs (2,1,4,3): sum d^2 = 4 -> rho = 1 - 24/60 = 0.6
    rho, p, n = spearman_top_words(["w1", "w2", "w3", "w4"], ["w2", "w1", "w4", "w3"])
    assert rho == pytest.approx(0.6, abs=1e-12)
    assert n == 4
    assert 0.0 < p < 1.0


def test_fully_disjoint_lists_negative():
    list_a = [f"a{i}" for i in range(100)]
    list_b = [f"b{i}" for i in range(100)]
    rho, p, n = spearman_top_words(list_a, list_b)
    assert n == 200
    assert rho < 0
    # independent construction of the rank vectors + classical Pearson
    ranks_a = list(range(1, 101)) + [150.5] * 100
    ranks_b = [150.5] * 100 + list(range(1, 101))
    mean = sum(ranks_a) / 200
    cov = sum((x - mean) * (y - mean) for x, y in zip(ranks_a, ranks_b))
    var = sum((x - mean) ** 2 for x in ranks_a)
    assert rho == pytest.approx(cov / var, abs=1e-12)


def test_matches_classical_formula_without_ties():
    rng = random.Random(606)
    words = [f"w{i}" for i in range(12)]
    for _ in range(1000):
        shuffled = words[:]
        rng.shuffle(shuffled)
        rho, _, _ = spearman_top_words(words, shuffled)
        expected = classical_spearman(
            list(range(1, 13)), [shuffled.index(w) + 1 for w in words]
        )
        assert rho == pytest.approx(expected, abs=1e-12)


def test_symmetry():
    list_a = ["x", "y", "z", "q"]
    list_b = ["y", "x", "k", "z"]
    assert spearman_top_words(list_a, list_b)[:2] == spearman_top_words(list_b, list_a)[:2]


def test_p_monotone_in_rho_at_fixed_n():
    # build lists of 10 with increasing disorder; p must rise as |rho| falls
    words = [f"w{i}" for i in range(10)]
    swaps = [
        words[:],  # rho = 1 handled separately (p=0)
        words[:2][::-1] + words[2:],
        words[:4][::-1] + words[4:],
        words[:6][::-1] + words[6:],
        words[:8][::-1] + words[8:],
    ]
    scored = [spearman_top_words(words, lst) for lst in swaps]
    rhos = [s[0] for s in scored]
    ps = [s[1] for s in scored]
    assert all(r1 >= r2 for r1, r2 in zip(rhos, rhos[1:]))
    assert ps[0] == 0.0
    assert all(p1 <= p2 for p1, p2 in zip(ps[1:], ps[2:]))


def test_small_union_p_none():
    rho, p, n = spearman_top_words(["a", "b"], ["a", "c"])
    assert n == 3 and p is None


def test_p_decreasing_on_rho_grid():
    from surveytext.topic_compare import _t_test_p

    for n in (10, 50, 200):
        previous = 1.1
        for rho_scaled in range(1, 10):
            p = _t_test_p(rho_scaled / 10.0, n)
            assert p < previous
            previous = p


def test_empty_list_rejected():
    with pytest.raises(DataError):
        spearman_top_words([], ["a"])


def test_permutation_p_close_to_t_approx():
    words_a = [f"w{i}" for i in range(15)]
    words_b = words_a[:3][::-1] + words_a[3:12] + words_a[12:][::-1]
    rho, p_t, _ = spearman_top_words(words_a, words_b)
    p_perm = spearman_permutation_p(words_a, words_b, permutations=4000, seed=9)
    assert p_perm == pytest.approx(p_t, abs=0.05)


# --- pair classification ---------------------------------------------------------


def test_classify_thresholds():
    assert classify_pair(0.96, 0.001) is True
    assert classify_pair(0.44, 0.01) is False
    assert classify_pair(0.70, 0.05) is False  # strict p
    assert classify_pair(0.70, 0.049) is True
    assert classify_pair(0.69, 0.001) is False
    assert classify_pair(0.9, None) is False


# --- model matching ---------------------------------------------------------------


def test_self_comparison_matches_everything():
    model = toy_model((["a", "b", "c", "d"], ["r1", "r2"]), (["x", "y", "z", "w"], ["r3"]))
    report = match_models(model, model)
    assert report.n_similar == 2
    assert report.matched == ((0, 0), (1, 1))
    assert report.pct_texts_similar == 100.0
    assert report.unmatched_a == () and report.unmatched_b == ()


def test_self_comparison_with_outliers_pct():
    model = TopicModel(
        topics=(
            Topic(0, (("a", 1.0), ("b", 0.5), ("c", 0.3), ("d", 0.2)), ("r1", "r2", "r3")),
        ),
        min_cluster_size=2,
        m_total_answers=4,
        outlier_ids=("r4",),
    )
    # a single-topic model is still comparable against itself
    report = match_models(model, model)
    assert report.pct_texts_similar == 75.0  # 3 of 4 answers non-outlier
    assert report.pct_texts_similar_nonoutlier == 100.0


def test_greedy_matching_never_reuses_topics():
    # adversarial: every cross pair passes; greedy must yield a perfect
    # one-to-one matching
    shared = [f"w{i}" for i in range(20)]
    model_a = toy_model((shared, ["r1"]), (shared[:19] + ["extra"], ["r2"]))
    model_b = toy_model((shared, ["r1"]), (shared[:18] + ["e1", "e2"], ["r2"]))
    report = match_models(model_a, model_b)
    matched_a = [a for a, _ in report.matched]
    matched_b = [b for _, b in report.matched]
    assert len(matched_a) == len(set(matched_a))
    assert len(matched_b) == len(set(matched_b))
    assert report.n_similar <= min(report.n_topics_a, report.n_topics_b)
    assert report.n_similar_pairs_raw >= report.n_similar


def test_empty_model_rejected():
    empty = TopicModel(topics=(), min_cluster_size=2, m_total_answers=0, outlier_ids=())
    full = toy_model((["a", "b", "c", "d"], ["r1"]))
    with pytest.raises(ComputationError):
        match_models(empty, full)


def test_planted_clean_vs_clean_and_noised(planted):
    answers, _ = planted
    vectors = hash_embed_matrix(answers)
    _, model_clean = sweep(answers, vectors, sizes=range(2, 21), min_samples=PLANTED_MIN_SAMPLES)
    # identical copy: construction guarantees identical clusterings
    _, model_copy = sweep(answers, vectors, sizes=range(2, 21), min_samples=PLANTED_MIN_SAMPLES)
    report = match_models(model_clean, model_copy)
    assert report.n_similar == 3
    assert all(p.rho == 1.0 and p.p == 0.0 for p in report.pairs if p.similar)
    assert report.pct_texts_similar == 100.0

    vocab = tuple(sorted({t for ans in answers for t in ans.tokens}))
    spec = NoiseSpec(0.1397, 0.0919, 0.0154, seed=77, substitution_vocab=vocab)
    noised = [inject_noise(ans, spec) for ans in answers]
    noised_vectors = hash_embed_matrix(noised)
    _, model_noised = sweep(noised, noised_vectors, sizes=range(2, 21), min_samples=PLANTED_MIN_SAMPLES)
    noisy_report = match_models(model_clean, model_noised)
    # measured, not asserted: the report just has to be structurally sound
    assert 0 <= noisy_report.n_similar <= min(noisy_report.n_topics_a, noisy_report.n_topics_b)
    assert 0.0 <= noisy_report.pct_texts_similar <= 100.0

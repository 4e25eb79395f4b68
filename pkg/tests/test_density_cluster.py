from __future__ import annotations

import numpy as np
import pytest

from oracles import brute_force_mst_weight
from surveytext.density_cluster import (
    condensed_tree_csv,
    core_distances,
    hdbscan,
    minimum_spanning_tree,
    mutual_reachability,
    pairwise_distances,
    single_linkage_tree,
)
from surveytext.embeddings import hash_embed_matrix
from surveytext.errors import DataError


def partition(labels):
    """Cluster labels -> frozenset of member frozensets (outliers dropped)."""
    groups: dict[int, set[int]] = {}
    for idx, lab in enumerate(labels):
        if lab != -1:
            groups.setdefault(lab, set()).add(idx)
    return frozenset(frozenset(g) for g in groups.values())


# --- building blocks --------------------------------------------------------


def test_core_distance_is_kth_other_neighbour():
    points = np.array([[0.0], [1.0], [3.0], [7.0]])
    dist = pairwise_distances(points)
    cores = core_distances(dist, 2)
    assert cores[0] == 3.0  # neighbours at 1, 3, 7
    assert cores[1] == 2.0  # neighbours at 1, 2, 6


def test_mutual_reachability_takes_max():
    points = np.array([[0.0], [1.0], [10.0]])
    dist = pairwise_distances(points)
    cores = core_distances(dist, 1)
    reach = mutual_reachability(dist, cores)
    # cores: 1, 1, 9 ; reach(0,2) = max(1, 9, 10) = 10 ; reach(0,1) = 1
    assert reach[0, 2] == 10.0
    assert reach[0, 1] == 1.0
    assert np.all(np.diag(reach) == 0.0)


def test_mst_matches_brute_force_small_sets():
    rng = np.random.default_rng(2026)
    for trial in range(200):
        n = int(rng.integers(3, 9))
        points = rng.normal(size=(n, int(rng.integers(1, 4))))
        weights = pairwise_distances(points)
        edges = minimum_spanning_tree(weights)
        total = sum(w for _, _, w in edges)
        assert total == pytest.approx(brute_force_mst_weight(weights), abs=1e-9)


def test_mst_deterministic_under_ties():
    # four corners of a square: many equal-weight MSTs; output must be stable
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    weights = pairwise_distances(points)
    assert minimum_spanning_tree(weights) == minimum_spanning_tree(weights)


def test_single_linkage_tree_sizes():
    edges = [(0, 1, 1.0), (1, 2, 2.0)]
    merges = single_linkage_tree(edges, 3)
    assert merges[0][3] == 2 and merges[1][3] == 3


# --- the full clusterer ------------------------------------------------------


def test_two_blobs_1d_hand_case():
    # hand-computed MST and condensed tree over these 6 points give two
    # clusters splitting from the root at the single cross-blob edge
    points = np.array([0.0, 0.1, 0.2, 10.0, 10.1, 10.2])
    result = hdbscan(points, min_cluster_size=2, min_samples=2)
    assert result.n_clusters == 2
    assert result.labels == (0, 0, 0, 1, 1, 1)
    assert result.outlier_indices == ()


def test_too_few_points_all_outliers():
    result = hdbscan(np.array([0.0, 1.0]), min_cluster_size=3)
    assert result.n_clusters == 0
    assert result.labels == (-1, -1)


def test_explicit_min_samples_out_of_range():
    with pytest.raises(DataError):
        hdbscan(np.array([0.0, 1.0, 2.0]), min_cluster_size=2, min_samples=3)


def test_non_finite_input_rejected():
    with pytest.raises(DataError):
        hdbscan(np.array([0.0, np.nan, 2.0]), min_cluster_size=2)


def test_duplicated_point_set_keeps_partition():
    rng = np.random.default_rng(8)
    base = np.vstack(
        [rng.normal(0, 0.5, size=(8, 3)), rng.normal(6, 0.5, size=(8, 3))]
    )
    doubled = np.repeat(base, 2, axis=0)
    single = hdbscan(base, min_cluster_size=2, min_samples=2)
    double = hdbscan(doubled, min_cluster_size=2, min_samples=2)
    # each original point maps to rows 2i, 2i+1; the partition over the
    # original indices must be preserved up to renaming
    collapsed = tuple(double.labels[2 * i] for i in range(len(base)))
    assert all(
        double.labels[2 * i] == double.labels[2 * i + 1] for i in range(len(base))
    )
    assert partition(single.labels) == partition(collapsed)


def test_gaussian_blobs_ten_seeds():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        first = rng.normal(0.0, 1.0, size=(50, 5))
        second = rng.normal(0.0, 1.0, size=(50, 5))
        second[:, 0] += 10.0
        result = hdbscan(np.vstack([first, second]), min_cluster_size=10)
        labels = np.asarray(result.labels)
        assert result.n_clusters == 2
        assert -1 not in labels
        assert len(set(labels[:50])) == 1 and len(set(labels[50:])) == 1
        assert labels[0] != labels[50]


def test_permutation_invariance_of_partition():
    rng = np.random.default_rng(77)
    points = np.vstack(
        [rng.normal(0, 1, size=(20, 4)), rng.normal(8, 1, size=(25, 4)), rng.normal(-8, 1, size=(5, 4))]
    )
    base = hdbscan(points, min_cluster_size=5)
    for seed in range(5):
        perm = np.random.default_rng(seed).permutation(len(points))
        permuted = hdbscan(points[perm], min_cluster_size=5)
        # map permuted labels back to original positions
        restored = [-2] * len(points)
        for new_pos, old_pos in enumerate(perm):
            restored[old_pos] = permuted.labels[new_pos]
        assert partition(base.labels) == partition(tuple(restored))


def test_canonical_labels_by_smallest_member():
    points = np.array([10.0, 10.1, 10.2, 0.0, 0.1, 0.2])
    result = hdbscan(points, min_cluster_size=2, min_samples=2)
    # cluster containing point 0 gets label 0 even though it sits "right"
    assert result.labels[0] == 0 and result.labels[3] == 1


def test_selected_stability_exceeds_children():
    rng = np.random.default_rng(4)
    points = np.vstack([rng.normal(c, 0.8, size=(15, 3)) for c in (0.0, 7.0, 14.0)])
    result = hdbscan(points, min_cluster_size=3)
    children: dict[int, list[int]] = {}
    for parent, child, _, _ in result.condensed_tree:
        if child >= len(points):
            children.setdefault(parent, []).append(child)

    def selected_mass(node):
        if node in result.selected:
            return result.stabilities[node]
        return sum(selected_mass(ch) for ch in children.get(node, ()))

    for node in result.selected:
        child_mass = sum(selected_mass(ch) for ch in children.get(node, ()))
        assert result.stabilities[node] >= child_mass - 1e-12


def test_lambda_nondecreasing_root_to_leaf():
    rng = np.random.default_rng(12)
    points = rng.normal(size=(40, 3))
    result = hdbscan(points, min_cluster_size=4)
    birth = {}
    n = 40
    for parent, child, lam, _ in result.condensed_tree:
        if child >= n:
            birth[child] = lam
    for parent, child, lam, _ in result.condensed_tree:
        parent_birth = birth.get(parent, 0.0)
        assert lam >= parent_birth - 1e-12


def test_outliers_monotone_in_min_cluster_size(planted):
    answers, _ = planted
    mat = hash_embed_matrix(answers)
    previous = -1
    for mcs in range(2, 11):
        result = hdbscan(mat, min_cluster_size=mcs, min_samples=2)
        n_outliers = len(result.outlier_indices)
        assert n_outliers >= previous
        previous = n_outliers


def test_condensed_tree_csv_shape():
    result = hdbscan(np.array([0.0, 0.1, 5.0, 5.1]), min_cluster_size=2, min_samples=1)
    csv_text = condensed_tree_csv(result)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "parent,child,lambda,size"
    assert all(len(line.split(",")) == 4 for line in lines[1:])

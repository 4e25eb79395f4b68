"""Hierarchical density-based clustering with outliers, from scratch.

The pipeline is the classic one: per-point core distances, the mutual
reachability graph, its exact minimum spanning tree (dense Prim — corpus
sizes here are a few thousand answers, so exactness and determinism beat
asymptotics), a single-linkage dendrogram, a condensed cluster tree at a
minimum cluster size, and stability-based (excess of mass) cluster
extraction. The number of clusters is never specified, only the minimum
cluster size; points that never join a stable cluster are outliers.

Every step breaks ties by index so that the whole procedure is a pure
function of the input matrix: permuting the input rows permutes the
labels but never changes the partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingMatrix
from .errors import DataError


@dataclass(frozen=True)
class ClusterResult:
    """Clustering of n points: labels (cluster id >= 0, outlier -1) plus
    the condensed tree and per-cluster stabilities that produced them.

    ``condensed_tree`` rows are (parent, child, lambda, child_size);
    point ids are 0..n-1, cluster node ids start at n with the root
    cluster. ``selected`` maps the chosen tree nodes to canonical labels
    (clusters numbered by their smallest member index).
    """

    labels: tuple[int, ...]
    n_clusters: int
    condensed_tree: tuple[tuple[int, int, float, int], ...]
    stabilities: dict[int, float]
    selected: dict[int, int]
    min_cluster_size: int
    min_samples: int

    @property
    def outlier_indices(self) -> tuple[int, ...]:
        return tuple(i for i, lab in enumerate(self.labels) if lab == -1)

    def members(self, label: int) -> tuple[int, ...]:
        return tuple(i for i, lab in enumerate(self.labels) if lab == label)


def _as_array(vectors: EmbeddingMatrix | np.ndarray) -> np.ndarray:
    array = vectors.vectors if isinstance(vectors, EmbeddingMatrix) else np.asarray(vectors, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, None]
    if not np.all(np.isfinite(array)):
        raise DataError("non-finite coordinates in clustering input")
    return array


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix, computed row by row for exactness."""
    n = len(points)
    dist = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        diff = points - points[i]
        dist[i] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return dist


def core_distances(dist: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance from each point to its min_samples-th nearest other point."""
    n = len(dist)
    if not 1 <= min_samples <= n - 1:
        raise DataError(
            f"min_samples={min_samples} needs at least min_samples+1 points, have {n}"
        )
    cores = np.empty(n, dtype=np.float64)
    for i in range(n):
        others = np.delete(dist[i], i)
        others.sort()
        cores[i] = others[min_samples - 1]
    return cores


def mutual_reachability(dist: np.ndarray, cores: np.ndarray) -> np.ndarray:
    """max(core(a), core(b), distance(a, b)) for every pair; 0 on the diagonal."""
    reach = np.maximum(dist, np.maximum(cores[:, None], cores[None, :]))
    np.fill_diagonal(reach, 0.0)
    return reach


def minimum_spanning_tree(weights: np.ndarray) -> list[tuple[int, int, float]]:
    """Exact MST of a dense weighted graph via Prim's algorithm.

    Tie-break: among equal-weight candidate edges the lexicographically
    smaller (min index, max index) pair wins, so the edge list is unique.
    """
    n = len(weights)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    key = weights[0].copy()
    key[0] = np.inf
    parent = np.zeros(n, dtype=np.int64)
    edges: list[tuple[int, int, float]] = []

    for _ in range(n - 1):
        candidates = np.flatnonzero(~in_tree)
        keys = key[candidates]
        best = keys.min()
        tied = candidates[keys == best]
        if len(tied) == 1:
            v = int(tied[0])
        else:
            v = int(
                min(
                    tied,
                    key=lambda t: (min(parent[t], t), max(parent[t], t)),
                )
            )
        p = int(parent[v])
        edges.append((min(p, v), max(p, v), float(key[v])))
        in_tree[v] = True
        key[v] = np.inf

        row = weights[v]
        open_idx = np.flatnonzero(~in_tree)
        better = open_idx[row[open_idx] < key[open_idx]]
        key[better] = row[better]
        parent[better] = v
        equal = open_idx[row[open_idx] == key[open_idx]]
        for u in equal:
            if (min(v, u), max(v, u)) < (min(parent[u], u), max(parent[u], u)):
                parent[u] = v
    return edges


def single_linkage_tree(
    edges: Sequence[tuple[int, int, float]], n: int
) -> list[tuple[int, int, float, int]]:
    """Merge MST edges in ascending order into a dendrogram.

    Nodes 0..n-1 are points; merge node n+k is created by the k-th merge
    and is recorded as (left_node, right_node, distance, size).
    """
    order = sorted(range(len(edges)), key=lambda k: (edges[k][2], edges[k][0], edges[k][1]))
    parent = list(range(n))
    top = list(range(n))
    size = [1] * n

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    merges: list[tuple[int, int, float, int]] = []
    next_node = n
    for k in order:
        u, v, w = edges[k]
        ru, rv = find(u), find(v)
        merged_size = size[ru] + size[rv]
        merges.append((top[ru], top[rv], w, merged_size))
        parent[rv] = ru
        top[ru] = next_node
        size[ru] = merged_size
        next_node += 1
    return merges


def _lambda_cap(merges: Sequence[tuple[int, int, float, int]]) -> float:
    """Finite stand-in for 1/0: strictly larger than every finite lambda,
    so zero-distance (duplicate-point) splits sort after everything else."""
    positive = [m[2] for m in merges if m[2] > 0.0]
    return 2.0 / min(positive) if positive else 1.0


def condense_tree(
    merges: Sequence[tuple[int, int, float, int]], n: int, min_cluster_size: int
) -> list[tuple[int, int, float, int]]:
    """Prune the dendrogram into the condensed cluster tree.

    Walking from the root, a split where both sides hold at least
    min_cluster_size points creates two child clusters; a smaller side
    sheds its points at that split's lambda = 1/distance while the
    cluster itself carries on. Rows are (parent, child, lambda, size)
    with cluster ids starting at n (the root cluster).
    """
    if not merges:
        return []
    cap = _lambda_cap(merges)
    children: dict[int, tuple[int, int, float]] = {}
    sizes = {i: 1 for i in range(n)}
    for k, (left, right, dist, size) in enumerate(merges):
        children[n + k] = (left, right, dist)
        sizes[n + k] = size

    def leaves(node: int) -> list[int]:
        out: list[int] = []
        stack = [node]
        while stack:
            cur = stack.pop()
            if cur < n:
                out.append(cur)
            else:
                left, right, _ = children[cur]
                stack.extend((right, left))
        return out

    root = n + len(merges) - 1
    rows: list[tuple[int, int, float, int]] = []
    next_label = n + 1
    queue: list[tuple[int, int]] = [(root, n)]  # (dendrogram node, cluster label)
    while queue:
        node, label = queue.pop(0)
        if node < n:
            continue
        left, right, dist = children[node]
        lam = (1.0 / dist) if dist > 0.0 else cap
        left_size, right_size = sizes[left], sizes[right]
        if left_size >= min_cluster_size and right_size >= min_cluster_size:
            for child, child_size in ((left, left_size), (right, right_size)):
                rows.append((label, next_label, lam, child_size))
                queue.append((child, next_label))
                next_label += 1
        elif left_size < min_cluster_size and right_size < min_cluster_size:
            for point in leaves(left) + leaves(right):
                rows.append((label, point, lam, 1))
        else:
            keep, shed = (left, right) if left_size >= min_cluster_size else (right, left)
            for point in leaves(shed):
                rows.append((label, point, lam, 1))
            queue.append((keep, label))
    return rows


def compute_stabilities(
    condensed: Sequence[tuple[int, int, float, int]], n: int
) -> dict[int, float]:
    """Stability of every condensed cluster: sum over its points of the
    lambda span between the point leaving and the cluster's birth.
    A point also "leaves" its cluster when the cluster splits in two."""
    births: dict[int, float] = {n: 0.0}
    for parent, child, lam, _ in condensed:
        if child >= n:
            births[child] = lam
    stabilities = {cluster: 0.0 for cluster in births}
    for parent, child, lam, size in condensed:
        stabilities[parent] += (lam - births[parent]) * size
    return stabilities


def select_clusters_eom(
    condensed: Sequence[tuple[int, int, float, int]],
    stabilities: dict[int, float],
    n: int,
    allow_single_cluster: bool = False,
) -> set[int]:
    """Excess-of-mass selection over the condensed cluster tree.

    Bottom-up: a cluster is kept only when its own stability strictly
    exceeds the combined stability of the clusters already selected
    beneath it. The root is only ever eligible when explicitly allowed.
    """
    cluster_children: dict[int, list[int]] = {c: [] for c in stabilities}
    for parent, child, _, _ in condensed:
        if child >= n:
            cluster_children[parent].append(child)

    selected: set[int] = set()
    subtree_mass: dict[int, float] = {}

    def descendants(cluster: int) -> list[int]:
        out: list[int] = []
        stack = list(cluster_children[cluster])
        while stack:
            cur = stack.pop()
            out.append(cur)
            stack.extend(cluster_children[cur])
        return out

    for cluster in sorted(stabilities, reverse=True):
        child_mass = sum(subtree_mass[ch] for ch in cluster_children[cluster])
        if cluster == n and not allow_single_cluster:
            subtree_mass[cluster] = child_mass
            continue
        if stabilities[cluster] > child_mass:
            for dropped in descendants(cluster):
                selected.discard(dropped)
            selected.add(cluster)
            subtree_mass[cluster] = stabilities[cluster]
        else:
            subtree_mass[cluster] = child_mass
    return selected


def hdbscan(
    vectors: EmbeddingMatrix | np.ndarray,
    min_cluster_size: int,
    min_samples: int | None = None,
    allow_single_cluster: bool = False,
) -> ClusterResult:
    """Cluster points by density; see the module docstring for the steps.

    min_samples defaults to min_cluster_size (capped at n-1); passing it
    explicitly out of [1, n-1] is an error.
    """
    points = _as_array(vectors)
    n = len(points)
    if n < 2:
        raise DataError(f"clustering needs at least 2 points, got {n}")
    if min_cluster_size < 2:
        raise DataError(f"min_cluster_size must be at least 2, got {min_cluster_size}")
    if min_samples is None:
        effective_min_samples = min(min_cluster_size, n - 1)
    else:
        if not 1 <= min_samples <= n - 1:
            raise DataError(
                f"min_samples={min_samples} needs at least min_samples+1 points, have {n}"
            )
        effective_min_samples = min_samples

    dist = pairwise_distances(points)
    cores = core_distances(dist, effective_min_samples)
    reach = mutual_reachability(dist, cores)
    mst = minimum_spanning_tree(reach)
    merges = single_linkage_tree(mst, n)
    condensed = condense_tree(merges, n, min_cluster_size)
    stabilities = compute_stabilities(condensed, n)
    chosen = select_clusters_eom(condensed, stabilities, n, allow_single_cluster)

    cluster_points: dict[int, list[int]] = {}
    point_rows: dict[int, list[int]] = {}
    cluster_children: dict[int, list[int]] = {}
    for parent, child, _, _ in condensed:
        if child < n:
            point_rows.setdefault(parent, []).append(child)
        else:
            cluster_children.setdefault(parent, []).append(child)
    for cluster in chosen:
        members: list[int] = []
        stack = [cluster]
        while stack:
            cur = stack.pop()
            members.extend(point_rows.get(cur, ()))
            stack.extend(cluster_children.get(cur, ()))
        cluster_points[cluster] = sorted(members)

    ordered = sorted(chosen, key=lambda c: cluster_points[c][0] if cluster_points[c] else -1)
    selected_map = {cluster: idx for idx, cluster in enumerate(ordered)}
    labels = [-1] * n
    for cluster, label in selected_map.items():
        for point in cluster_points[cluster]:
            labels[point] = label

    return ClusterResult(
        labels=tuple(labels),
        n_clusters=len(selected_map),
        condensed_tree=tuple(condensed),
        stabilities=stabilities,
        selected=selected_map,
        min_cluster_size=min_cluster_size,
        min_samples=effective_min_samples,
    )


def condensed_tree_csv(result: ClusterResult) -> str:
    """Debug dump of the condensed tree: parent,child,lambda,size lines."""
    lines = ["parent,child,lambda,size"]
    for parent, child, lam, size in result.condensed_tree:
        lines.append(f"{parent},{child},{lam!r},{size}")
    return "\n".join(lines) + "\n"

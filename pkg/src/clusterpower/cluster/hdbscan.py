"""HDBSCAN: mutual reachability MST, condensed tree, excess-of-mass selection."""

from __future__ import annotations

from collections import defaultdict, deque

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .base import NOISE, ClusterSolution, HDBSCANParams


def core_distances(dist: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to the ``min_samples``-th nearest neighbour, not counting the point itself."""
    # column 0 of each sorted row is the point itself
    return np.sort(dist, axis=1)[:, min_samples]


def mutual_reachability(data: np.ndarray, min_samples: int) -> np.ndarray:
    dist = squareform(pdist(np.asarray(data, dtype=float)))
    core = core_distances(dist, min_samples)
    mr = np.maximum(dist, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mr, 0.0)
    return mr


def minimum_spanning_tree(weights: np.ndarray) -> np.ndarray:
    """Prim's algorithm on a dense symmetric matrix; rows are (i, j, weight)."""
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = weights[0].astype(float).copy()
    parent = np.zeros(n, dtype=int)
    edges = np.empty((n - 1, 3))
    for e in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        edges[e] = (parent[v], v, best[v])
        in_tree[v] = True
        closer = weights[v] < best
        best = np.where(closer, weights[v], best)
        parent = np.where(closer, v, parent)
    return edges


def single_linkage(mst: np.ndarray, n: int) -> np.ndarray:
    """Dendrogram rows (left, right, distance, size) with new nodes numbered from n."""
    order = np.argsort(mst[:, 2], kind="stable")
    parent = np.arange(2 * n - 1)
    size = np.concatenate([np.ones(n, dtype=int), np.zeros(n - 1, dtype=int)])

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = np.empty((n - 1, 4))
    for step, e in enumerate(order):
        a, b, w = int(mst[e, 0]), int(mst[e, 1]), mst[e, 2]
        ra, rb = find(a), find(b)
        node = n + step
        parent[ra] = parent[rb] = node
        size[node] = size[ra] + size[rb]
        tree[step] = (ra, rb, w, size[node])
    return tree


def condense_tree(tree: np.ndarray, min_cluster_size: int) -> list[tuple[int, int, float, int]]:
    """Collapse the dendrogram into (parent, child, lambda, child_size) rows.

    Cluster ids start at n (the root). Splits where both sides hold at least
    ``min_cluster_size`` points create two new clusters; smaller sides shed
    their points from the parent at the split's lambda = 1 / distance.
    """
    n = tree.shape[0] + 1
    root = 2 * n - 2

    def children(node):
        row = tree[node - n]
        return int(row[0]), int(row[1]), row[2]

    def size_of(node):
        return 1 if node < n else int(tree[node - n, 3])

    def leaves(node):
        out, stack = [], [node]
        while stack:
            cur = stack.pop()
            if cur < n:
                out.append(cur)
            else:
                left, right, _ = children(cur)
                stack.extend((right, left))
        return out

    relabel = {root: n}
    next_label = n + 1
    rows = []
    queue = deque([root])
    while queue:
        node = queue.popleft()
        if node < n:
            continue
        left, right, dist = children(node)
        lam = 1.0 / dist if dist > 0 else np.inf
        parent = relabel[node]
        lsize, rsize = size_of(left), size_of(right)
        if lsize >= min_cluster_size and rsize >= min_cluster_size:
            for child, csize in ((left, lsize), (right, rsize)):
                relabel[child] = next_label
                rows.append((parent, next_label, lam, csize))
                next_label += 1
                queue.append(child)
        else:
            for child, csize in ((left, lsize), (right, rsize)):
                if csize >= min_cluster_size:
                    relabel[child] = parent
                    queue.append(child)
                else:
                    rows.extend((parent, leaf, lam, 1) for leaf in leaves(child))
    return rows


def cluster_stability(condensed) -> dict[int, float]:
    if not condensed:
        return {}
    root = min(r[0] for r in condensed)
    birth = {root: 0.0}
    for parent, child, lam, size in condensed:
        if size > 1:
            birth[child] = lam
    stability = defaultdict(float)
    for c in birth:
        stability[c] = 0.0
    for parent, child, lam, size in condensed:
        stability[parent] += (lam - birth[parent]) * size
    return dict(stability)


def select_clusters(condensed, allow_single_cluster: bool = False) -> list[int]:
    """Excess-of-mass selection; returns selected cluster ids in ascending order."""
    stability = cluster_stability(condensed)
    if not stability:
        return []
    kids = defaultdict(list)
    for parent, child, _, size in condensed:
        if size > 1:
            kids[parent].append(child)
    nodes = sorted(stability, reverse=True)
    if not allow_single_cluster:
        nodes = nodes[:-1]
    selected = {c: True for c in nodes}
    for node in nodes:
        subtree = sum(stability[c] for c in kids[node])
        if subtree > stability[node]:
            selected[node] = False
            stability[node] = subtree
        else:
            stack = list(kids[node])
            while stack:
                cur = stack.pop()
                selected[cur] = False
                stack.extend(kids[cur])
    return sorted(c for c, keep in selected.items() if keep)


def label_points(condensed, selected: list[int], n: int) -> np.ndarray:
    """Each point takes the selected cluster above where it fell out, or noise."""
    up = {}
    fell_from = np.full(n, -1)
    for parent, child, _, size in condensed:
        if size > 1:
            up[child] = parent
        else:
            fell_from[child] = parent
    index = {c: i for i, c in enumerate(selected)}
    labels = np.full(n, NOISE, dtype=int)
    for i in range(n):
        node = int(fell_from[i])
        while node != -1 and node not in index:
            node = up.get(node, -1)
        if node != -1:
            labels[i] = index[node]
    return labels


def hdbscan(data: np.ndarray, params: HDBSCANParams | None = None) -> ClusterSolution:
    """Density-based clustering; points left out of every cluster get label -1.

    Fewer observations than ``min_cluster_size`` yields an all-noise result.
    """
    params = params or HDBSCANParams()
    x = np.asarray(data, dtype=float)
    n = x.shape[0]
    if n < max(params.min_cluster_size, 2):
        return ClusterSolution(np.full(n, NOISE, dtype=int), 0, objective=0.0, degenerate=True)
    min_samples = max(1, min(n - 1, params.min_samples))
    mst = minimum_spanning_tree(mutual_reachability(x, min_samples))
    condensed = condense_tree(single_linkage(mst, n), params.min_cluster_size)
    selected = select_clusters(condensed)
    labels = label_points(condensed, selected, n)
    found = len(selected)
    centroids = np.stack([x[labels == j].mean(axis=0) for j in range(found)]) if found else None
    stability = cluster_stability(condensed)
    total = float(sum(stability[c] for c in selected))
    return ClusterSolution(labels, found, centroids, None, total, found == 0)

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .base import ClusterSolution, check_k, compact_labels

SUPPORTED = {("ward", "euclidean"), ("average", "cosine"), ("average", "euclidean")}


class UnsupportedLinkageError(ValueError):
    pass


def pairwise_dissimilarity(x: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        return squareform(pdist(x))
    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        if (norms == 0).any():
            raise ValueError("cosine distance is undefined for an all-zero observation")
        unit = x / norms[:, None]
        d = 1.0 - unit @ unit.T
        np.fill_diagonal(d, 0.0)
        return np.clip((d + d.T) / 2, 0.0, 2.0)
    raise UnsupportedLinkageError(f"unknown metric {metric!r}")


def _merge_sequence(x: np.ndarray, linkage: str, metric: str, stop_at: int):
    """Run Lance-Williams agglomeration until ``stop_at`` clusters remain.

    Each merged cluster keeps the lower of its two slot indices. The closest
    pair is found with a row-major argmin, so ties go to the lowest (i, j).
    Ward works on squared Euclidean distances and reports their root.
    """
    if (linkage, metric) not in SUPPORTED:
        raise UnsupportedLinkageError(f"{linkage} linkage with {metric} distance is not supported")
    n = x.shape[0]
    d = pairwise_dissimilarity(x, metric)
    if linkage == "ward":
        d = d**2
    d = d.astype(float)
    np.fill_diagonal(d, np.inf)
    size = np.ones(n)
    members = [[i] for i in range(n)]
    merges = []
    for _ in range(n - stop_at):
        flat = int(np.argmin(d))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        height = d[i, j]
        ni, nj = size[i], size[j]
        if linkage == "ward":
            nk = size
            new = ((ni + nk) * d[i] + (nj + nk) * d[j] - nk * height) / (ni + nj + nk)
        else:
            new = (ni * d[i] + nj * d[j]) / (ni + nj)
        d[i, :] = new
        d[:, i] = new
        d[i, i] = np.inf
        d[j, :] = np.inf
        d[:, j] = np.inf
        merges.append((tuple(members[i]), tuple(members[j]), float(np.sqrt(height) if linkage == "ward" else height)))
        members[i] = sorted(members[i] + members[j])
        members[j] = []
        size[i] = ni + nj
        size[j] = 0
    return merges, [m for m in members if m]


def merge_sequence(data: np.ndarray, linkage: str = "ward", metric: str = "euclidean"):
    """Full merge history down to one cluster: (members_a, members_b, height) per step."""
    x = np.asarray(data, dtype=float)
    return _merge_sequence(x, linkage, metric, 1)[0]


def agglomerative(
    data: np.ndarray, k: int, linkage: str = "ward", metric: str = "euclidean"
) -> ClusterSolution:
    """Hierarchical agglomerative clustering cut at ``k`` clusters."""
    x = np.asarray(data, dtype=float)
    check_k(x.shape[0], k)
    _, groups = _merge_sequence(x, linkage, metric, k)
    raw = np.empty(x.shape[0], dtype=int)
    for g, idx in enumerate(groups):
        raw[idx] = g
    labels, found = compact_labels(raw)
    centroids = np.stack([x[labels == j].mean(axis=0) for j in range(found)])
    return ClusterSolution(labels, found, centroids)

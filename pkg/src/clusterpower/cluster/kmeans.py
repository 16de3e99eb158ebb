from __future__ import annotations

import numpy as np

from .base import ClusterSolution, KMeansParams, check_k, compact_labels


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kmeans_plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++ seeding (2 + log k candidates per step)."""
    n, p = x.shape
    n_local = 2 + int(np.log(k))
    centers = np.empty((k, p))
    centers[0] = x[rng.integers(n)]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        pot = closest.sum()
        if pot <= 0:
            centers[c] = x[rng.integers(n)]
            continue
        draws = rng.uniform(size=n_local) * pot
        cand = np.minimum(np.searchsorted(np.cumsum(closest), draws), n - 1)
        cand_d = np.minimum(closest[None, :], _sq_dists(x, x[cand]).T)
        best = int(np.argmin(cand_d.sum(axis=1)))
        centers[c] = x[cand[best]]
        closest = cand_d[best]
    return centers


def lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    """Lloyd iterations; returns labels, centers, inertia, iterations, inertia history.

    ``tol`` bounds the total squared centroid shift. Clusters that empty out
    are re-seeded at the points currently farthest from their own centroid.
    """
    n, k = x.shape[0], centers.shape[0]
    centers = centers.copy()
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _sq_dists(x, centers)
        labels = np.argmin(d2, axis=1)
        own = d2[np.arange(n), labels]
        history.append(float(own.sum()))

        counts = np.bincount(labels, minlength=k)
        onehot = np.zeros((n, k))
        onehot[np.arange(n), labels] = 1.0
        sums = onehot.T @ x
        new = centers.copy()
        filled = counts > 0
        new[filled] = sums[filled] / counts[filled, None]
        empty = np.flatnonzero(~filled)
        if empty.size:
            far = np.argsort(-own, kind="stable")[: empty.size]
            new[empty] = x[far]

        shift = float(np.sum((new - centers) ** 2))
        centers = new
        if shift <= tol:
            break
    d2 = _sq_dists(x, centers)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return labels, centers, inertia, n_iter, history + [inertia]


def kmeans(
    data: np.ndarray,
    k: int,
    params: KMeansParams | None = None,
    rng: np.random.Generator | None = None,
) -> ClusterSolution:
    """Best-of-``n_init`` k-means with k-means++ seeding.

    Inertia is the sum of squared distances to the assigned centroid. The
    convergence tolerance is scaled by the mean per-feature variance so it
    does not depend on the data's units. Ties between restarts go to the
    earliest one.
    """
    params = params or KMeansParams()
    rng = np.random.default_rng() if rng is None else rng
    x = np.asarray(data, dtype=float)
    check_k(x.shape[0], k)
    tol = params.tol * float(np.mean(np.var(x, axis=0)))

    best = None
    for _ in range(params.n_init):
        seeds = kmeans_plusplus(x, k, rng)
        run = lloyd(x, seeds, params.max_iter, tol)
        if best is None or run[2] < best[2]:
            best = run
    labels, centers, inertia, n_iter, history = best

    found = len(np.unique(labels))
    if found < k:
        compact, found = compact_labels(labels)
        keep = [int(labels[np.flatnonzero(compact == j)[0]]) for j in range(found)]
        return ClusterSolution(compact, found, centers[keep], None, inertia, True, n_iter, history)
    return ClusterSolution(labels, k, centers, None, inertia, False, n_iter, history)

from __future__ import annotations

import numpy as np

from .base import CMeansParams, ClusterSolution, check_k, compact_labels


def fuzzy_memberships(data: np.ndarray, centroids: np.ndarray, m: float = 2.0) -> np.ndarray:
    """Membership u_ij = 1 / sum_l (d_ij / d_il)^(2/(m-1)).

    A point sitting exactly on a centroid belongs to it fully (the first
    such centroid if several coincide).
    """
    x = np.asarray(data, dtype=float)
    diff = x[:, None, :] - np.asarray(centroids, dtype=float)[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return _memberships_from_dist(d, m)


def _memberships_from_dist(d: np.ndarray, m: float) -> np.ndarray:
    zero = d == 0
    hit = zero.any(axis=1)
    safe = np.where(zero, 1.0, d)
    # dividing by the row minimum keeps every ratio >= 1, so the power cannot overflow
    with np.errstate(over="ignore"):
        safe = safe / safe.min(axis=1, keepdims=True)
        inv = safe ** (-2.0 / (m - 1))
    u = inv / inv.sum(axis=1, keepdims=True)
    if hit.any():
        u[hit] = 0.0
        rows = np.flatnonzero(hit)
        u[rows, np.argmax(zero[rows], axis=1)] = 1.0
    return u


def _objective(d: np.ndarray, u: np.ndarray, m: float) -> float:
    return float(np.sum(u**m * d**2))


def _run(x, c, params, rng):
    n = x.shape[0]
    u = rng.uniform(size=(n, c))
    u /= u.sum(axis=1, keepdims=True)
    history = []
    n_iter = 0
    for n_iter in range(1, params.max_iter + 1):
        w = u**params.m
        v = (w.T @ x) / w.sum(axis=0)[:, None]
        diff = x[:, None, :] - v[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        new_u = _memberships_from_dist(d, params.m)
        history.append(_objective(d, new_u, params.m))
        change = float(np.max(np.abs(new_u - u)))
        u = new_u
        if change < params.tol:
            break
    return u, v, history[-1], n_iter, history


def cmeans(
    data: np.ndarray,
    c: int,
    params: CMeansParams | None = None,
    rng: np.random.Generator | None = None,
) -> ClusterSolution:
    """Fuzzy c-means from a random row-stochastic membership start.

    Alternates centroid and membership updates until the largest membership
    change drops below ``params.tol``. Hard labels are the argmax membership.
    """
    params = params or CMeansParams()
    rng = np.random.default_rng() if rng is None else rng
    x = np.asarray(data, dtype=float)
    check_k(x.shape[0], c)

    best = None
    for _ in range(params.n_init):
        run = _run(x, c, params, rng)
        if best is None or run[2] < best[2]:
            best = run
    u, v, obj, n_iter, history = best
    labels = np.argmax(u, axis=1)
    found = len(np.unique(labels))
    if found < c:
        # membership columns stay aligned with centroids; only labels are renumbered
        labels, found = compact_labels(labels)
    return ClusterSolution(labels, found, v, u, obj, found < c, n_iter, history)

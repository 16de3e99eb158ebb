"""Metric MDS by SMACOF stress majorization, and centroid separation in any space."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform


@dataclass
class Projection:
    coords: np.ndarray
    stress: float
    n_iterations_used: int
    degenerate: bool = False
    total_squared_distance: float = 0.0
    stress_history: list[float] = field(default_factory=list)

    @property
    def normalized_stress(self) -> float:
        """Kruskal stress-1: sqrt(raw stress / sum of squared original distances)."""
        if self.total_squared_distance == 0:
            return 0.0
        return float(np.sqrt(self.stress / self.total_squared_distance))

    def to_csv(self, path, truth=None) -> None:
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            m = self.coords.shape[1]
            header = ["x", "y"] if m == 2 else [f"c{j + 1}" for j in range(m)]
            writer.writerow(header + (["truth"] if truth is not None else []))
            for i, row in enumerate(self.coords):
                extra = [int(truth[i])] if truth is not None else []
                writer.writerow([repr(float(v)) for v in row] + extra)


class MonotonicityError(AssertionError):
    """SMACOF stress went up between iterations."""


def classical_mds(dist: np.ndarray, n_components: int = 2) -> np.ndarray:
    """Torgerson scaling of a square distance matrix."""
    n = dist.shape[0]
    j = np.eye(n) - 1.0 / n
    b = -0.5 * j @ (dist**2) @ j
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1][:n_components]
    return vecs[:, order] * np.sqrt(np.clip(vals[order], 0, None))


def _smacof_single(target, x, max_iter, tol):
    n = x.shape[0]
    total = float(np.sum(target**2))
    cur = pdist(x)
    history = [float(np.sum((target - cur) ** 2))]
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        # Guttman transform: x <- B(x) x / n, B = diag(rowsum(R)) - R, R = d_target / d_current
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = squareform(np.where(cur > 0, target / cur, 0.0))
        x = (ratio.sum(axis=1)[:, None] * x - ratio @ x) / n
        cur = pdist(x)
        stress = float(np.sum((target - cur) ** 2))
        prev = history[-1]
        if stress > prev * (1 + 1e-9) + 1e-12 * total:
            raise MonotonicityError(f"stress rose from {prev} to {stress} at iteration {n_iter}")
        history.append(stress)
        if stress <= 1e-14 * total or (prev - stress) <= tol * prev:
            break
    return x, history, n_iter


def mds(
    data: np.ndarray,
    n_components: int = 2,
    n_init: int = 4,
    max_iter: int = 300,
    tol: float = 1e-4,
    rng: np.random.Generator | None = None,
    init: str = "random",
) -> Projection:
    """Embed ``data`` in ``n_components`` dimensions preserving Euclidean distances.

    Runs SMACOF from ``n_init`` starts (uniform random, or one classical-MDS
    start with ``init="classical"``) and keeps the lowest-stress result; ties
    go to the earliest start. Iteration stops once the relative stress
    decrease falls below ``tol``. Coordinates are centered at the origin.
    """
    data = np.asarray(data, dtype=float)
    n, p = data.shape
    if n < 3:
        raise ValueError("mds needs at least 3 observations")
    if p < n_components:
        raise ValueError(f"cannot embed {p} features into {n_components} components")
    rng = np.random.default_rng() if rng is None else rng

    target = pdist(data)
    total = float(np.sum(target**2))
    if total == 0:
        return Projection(np.zeros((n, n_components)), 0.0, 0, degenerate=True)
    if init == "classical":
        starts = [classical_mds(squareform(target), n_components)]
    elif init == "random":
        starts = [rng.uniform(size=(n, n_components)) for _ in range(n_init)]
    else:
        raise ValueError(f"unknown init {init!r}")

    best = None
    for x0 in starts:
        x, history, n_iter = _smacof_single(target, x0, max_iter, tol)
        if best is None or history[-1] < best[1][-1]:
            best = (x, history, n_iter)
    x, history, n_iter = best
    x = x - x.mean(axis=0)
    return Projection(x, history[-1], n_iter, False, total, history)


def projected_separation(coords: np.ndarray, truth) -> float:
    """Centroid distance for two groups, minimum pairwise centroid distance for more."""
    coords = np.asarray(coords, dtype=float)
    truth = np.asarray(truth)
    labels = np.unique(truth)
    if len(labels) < 2:
        raise ValueError("separation is undefined for a single group")
    centroids = [coords[truth == lab].mean(axis=0) for lab in labels]
    return min(float(np.linalg.norm(a - b)) for a, b in combinations(centroids, 2))


@dataclass(frozen=True)
class MDSParams:
    n_init: int = 4
    max_iter: int = 300
    tol: float = 1e-4
    init: str = "random"

    def run(self, data, rng) -> Projection:
        return mds(data, 2, self.n_init, self.max_iter, self.tol, rng, self.init)

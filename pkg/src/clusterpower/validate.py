"""Cluster validity and agreement metrics.

Undefined scores (fewer than two usable clusters, all-zero fuzzy weights)
come back as ``nan``; ``nan >= threshold`` is False, so callers treat them as
"not clustered" without special-casing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import pdist, squareform

NOISE = -1
DEFAULT_THRESHOLD = 0.5
STRONG_THRESHOLD = 0.7


@dataclass
class ValidationResult:
    silhouette_score: float
    per_sample_silhouette: np.ndarray
    ari: float
    accuracy: float
    chance: float
    threshold: float = DEFAULT_THRESHOLD

    @property
    def clustered(self) -> bool:
        return bool(self.silhouette_score >= self.threshold)


def silhouette(data: np.ndarray, labels) -> tuple[np.ndarray, float]:
    """Per-sample silhouettes and their mean, ignoring noise points (label -1).

    Noise rows get ``nan`` in the per-sample vector. Members of singleton
    clusters score 0.
    """
    x = np.asarray(data, dtype=float)
    labels = np.asarray(labels)
    per_sample = np.full(len(labels), np.nan)
    keep = labels != NOISE
    uniq, inv = np.unique(labels[keep], return_inverse=True)
    if len(uniq) < 2:
        return per_sample, float("nan")

    dist = squareform(pdist(x[keep]))
    n = dist.shape[0]
    onehot = np.zeros((n, len(uniq)))
    onehot[np.arange(n), inv] = 1.0
    sums = dist @ onehot
    counts = onehot.sum(axis=0)

    own_count = counts[inv]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = sums[np.arange(n), inv] / (own_count - 1)
        mean_other = sums / counts
    mean_other[np.arange(n), inv] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own_count == 1] = 0.0
    per_sample[keep] = s
    return per_sample, float(s.mean())


def silhouette_score(data, labels) -> float:
    return silhouette(data, labels)[1]


def fuzzy_silhouette(data: np.ndarray, membership: np.ndarray, alpha: float = 1.0) -> float:
    """Crisp silhouettes weighted by (largest - second largest membership) ** alpha."""
    u = np.asarray(membership, dtype=float)
    if u.ndim != 2 or u.shape[1] < 2:
        raise ValueError("membership must be an N x k matrix with k >= 2")
    labels = np.argmax(u, axis=1)
    s, _ = silhouette(data, labels)
    if np.isnan(s).all():
        return float("nan")
    top2 = np.sort(u, axis=1)[:, -2:]
    gap = top2[:, 1] - top2[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(gap > 0, np.power(gap, alpha), 0.0)
    total = w.sum()
    if total <= 0:
        return float("nan")
    return float(np.sum(w * s) / total)


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2


def contingency(labels_a, labels_b) -> np.ndarray:
    _, ia = np.unique(labels_a, return_inverse=True)
    _, ib = np.unique(labels_b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=int)
    np.add.at(table, (ia, ib), 1)
    return table


def adjusted_rand(labels_a, labels_b) -> float:
    """Hubert-Arabie adjusted Rand index. Noise labels count as an ordinary group."""
    a, b = np.asarray(labels_a), np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError("labelings differ in length")
    n = a.size
    if n < 2:
        raise ValueError("adjusted Rand index needs at least two observations")
    table = contingency(a, b)
    index = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / _comb2(n)
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        # both partitions trivial (one block, or all singletons) and identical in kind
        return 1.0
    return float((index - expected) / (max_index - expected))


def classification_accuracy(pred, truth) -> float:
    """Fraction correct under the best one-to-one matching of predicted to true labels.

    Noise predictions never match. Matching is exhaustive for up to 6 labels,
    Hungarian assignment beyond that.
    """
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth differ in length")
    if pred.size == 0:
        return 0.0
    keep = pred != NOISE
    if not keep.any():
        return 0.0
    table = contingency(pred[keep], truth[keep])
    r, c = table.shape
    if max(r, c) <= 6:
        if r <= c:
            best = max(table[np.arange(r), list(p)].sum() for p in permutations(range(c), r))
        else:
            best = max(table[list(p), np.arange(c)].sum() for p in permutations(range(r), c))
    else:
        rows, cols = linear_sum_assignment(-table)
        best = table[rows, cols].sum()
    return float(best) / pred.size


def chance_level(truth) -> float:
    """Share of the largest true group: the accuracy of assigning everyone to it."""
    truth = np.asarray(truth)
    if truth.size == 0:
        raise ValueError("chance level of an empty labeling")
    _, counts = np.unique(truth, return_counts=True)
    return float(counts.max()) / truth.size


def evaluate(data, labels, truth, threshold: float = DEFAULT_THRESHOLD) -> ValidationResult:
    per_sample, score = silhouette(data, labels)
    return ValidationResult(
        silhouette_score=score,
        per_sample_silhouette=per_sample,
        ari=adjusted_rand(labels, truth),
        accuracy=classification_accuracy(labels, truth),
        chance=chance_level(truth),
        threshold=threshold,
    )

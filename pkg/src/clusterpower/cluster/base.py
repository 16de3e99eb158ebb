from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

NOISE = -1


@dataclass(frozen=True)
class KMeansParams:
    n_init: int = 10
    max_iter: int = 300
    tol: float = 1e-4


@dataclass(frozen=True)
class CMeansParams:
    m: float = 2.0
    max_iter: int = 300
    tol: float = 1e-5
    n_init: int = 1

    def __post_init__(self):
        if self.m <= 1:
            raise ValueError("fuzzifier m must exceed 1")


@dataclass(frozen=True)
class HDBSCANParams:
    min_cluster_size: int = 5
    min_samples: int = 5

    def __post_init__(self):
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be at least 2")
        if self.min_samples < 1:
            raise ValueError("min_samples must be at least 1")


@dataclass(frozen=True)
class AgglomerativeParams:
    linkage: Literal["ward", "average"] = "ward"
    metric: Literal["euclidean", "cosine"] = "euclidean"


@dataclass(frozen=True)
class AlgorithmParams:
    kmeans: KMeansParams = KMeansParams()
    cmeans: CMeansParams = CMeansParams()
    hdbscan: HDBSCANParams = HDBSCANParams()
    agglomerative: AgglomerativeParams = AgglomerativeParams()


@dataclass
class ClusterSolution:
    """Output of any clustering routine.

    ``labels`` use -1 for noise (HDBSCAN only); other labels run over
    ``0..n_clusters_found-1``. ``membership`` is set by c-means only.
    """

    labels: np.ndarray
    n_clusters_found: int
    centroids: np.ndarray | None = None
    membership: np.ndarray | None = None
    objective: float = float("nan")
    degenerate: bool = False
    n_iter: int = 0
    history: list[float] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["row_index", "label"])
            for i, lab in enumerate(self.labels):
                writer.writerow([i, int(lab)])

    def membership_to_csv(self, path) -> None:
        if self.membership is None:
            raise ValueError("solution has no membership matrix")
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"u{j}" for j in range(self.membership.shape[1])])
            for row in self.membership:
                writer.writerow([repr(float(v)) for v in row])


def compact_labels(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber non-noise labels to 0..m-1 in order of first appearance."""
    labels = np.asarray(labels)
    out = np.full(labels.shape, NOISE, dtype=int)
    mapping: dict[int, int] = {}
    for i, lab in enumerate(labels):
        if lab == NOISE:
            continue
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out, len(mapping)


def check_k(n: int, k: int) -> None:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of observations ({n})")

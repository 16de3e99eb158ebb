"""Synthetic clustered populations and finite samples drawn from them.

Two families of populations are supported:

* grid populations: 15 standardized features, two or three subgroups whose
  means differ by a Cohen's d in a chosen number of features, with one of
  several covariance structures;
* equidistant populations: 1 to 4 subgroups in (by default) 2 features whose
  centroids sit at a common separation Δ.

All randomness flows through an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

CovKind = Literal["identity", "random", "factor"]
GridConfig = Literal["two_10_90", "two_50_50", "three_equal"]
GridCovConfig = Literal["none", "random", "factor3", "factor4", "mixed_factor", "mixed_random"]

GRID_PROPORTIONS: dict[str, tuple[float, ...]] = {
    "two_10_90": (0.1, 0.9),
    "two_50_50": (0.5, 0.5),
    "three_equal": (0.33, 0.34, 0.33),
}

PSD_FLOOR = 1e-8


class InvalidSpecError(ValueError):
    """A population or covariance specification cannot be realized."""


class SamplingError(ValueError):
    """A dataset cannot be drawn with the requested size."""


@dataclass(frozen=True)
class CovarianceSpec:
    kind: CovKind = "identity"
    off_diag_range: tuple[float, float] = (-0.3, 0.3)
    n_factors: int = 3
    within_magnitude_range: tuple[float, float] = (0.4, 0.9)
    between_range: tuple[float, float] = (-0.3, 0.3)

    def __post_init__(self):
        if self.kind not in ("identity", "random", "factor"):
            raise InvalidSpecError(f"unknown covariance kind {self.kind!r}")
        for name in ("off_diag_range", "within_magnitude_range", "between_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidSpecError(f"{name} is not an interval: {(lo, hi)}")
        lo, hi = self.within_magnitude_range
        if lo < 0:
            raise InvalidSpecError("within_magnitude_range must be non-negative")
        if self.kind == "factor" and self.n_factors < 1:
            raise InvalidSpecError("n_factors must be positive")


@dataclass
class SubgroupSpec:
    proportion: float
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.covariance = np.asarray(self.covariance, dtype=float)
        if not 0 < self.proportion <= 1:
            raise InvalidSpecError(f"proportion must lie in (0, 1], got {self.proportion}")


@dataclass
class PopulationSpec:
    n_features: int
    subgroups: list[SubgroupSpec]

    def __post_init__(self):
        if self.n_features < 1:
            raise InvalidSpecError("n_features must be positive")
        if not self.subgroups:
            raise InvalidSpecError("a population needs at least one subgroup")
        p = self.n_features
        for g in self.subgroups:
            if g.mean.shape != (p,) or g.covariance.shape != (p, p):
                raise InvalidSpecError("subgroup dimensions do not match n_features")
        total = sum(g.proportion for g in self.subgroups)
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpecError(f"subgroup proportions sum to {total}, not 1")

    @property
    def k(self) -> int:
        return len(self.subgroups)

    @property
    def proportions(self) -> tuple[float, ...]:
        return tuple(g.proportion for g in self.subgroups)

    @property
    def means(self) -> np.ndarray:
        return np.stack([g.mean for g in self.subgroups])


@dataclass
class Dataset:
    data: np.ndarray
    truth: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def to_csv(self, path) -> None:
        """Write ``f1..fp,truth`` rows; floats use round-trip precision."""
        p = self.data.shape[1]
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"f{j + 1}" for j in range(p)] + ["truth"])
            for row, label in zip(self.data, self.truth):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])


def nearest_psd(m: np.ndarray, eps: float = PSD_FLOOR) -> np.ndarray:
    """Clamp eigenvalues at ``eps`` and rescale back to a unit diagonal.

    Inputs that are already PSD with a unit diagonal come back unchanged.
    """
    m = np.asarray(m, dtype=float)
    if not np.allclose(m, m.T, atol=1e-12):
        raise InvalidSpecError("nearest_psd needs a symmetric matrix")
    m = (m + m.T) / 2
    vals, vecs = np.linalg.eigh(m)
    if vals.min() >= 0 and np.allclose(np.diag(m), 1.0, atol=1e-12, rtol=0):
        return m
    repaired = (vecs * np.maximum(vals, eps)) @ vecs.T
    scale = 1.0 / np.sqrt(np.diag(repaired))
    repaired = repaired * np.outer(scale, scale)
    repaired = (repaired + repaired.T) / 2
    np.fill_diagonal(repaired, 1.0)
    return repaired


def factor_blocks(p: int, n_factors: int) -> list[np.ndarray]:
    """Contiguous feature blocks whose sizes differ by at most one."""
    if p < n_factors:
        raise InvalidSpecError(f"cannot split {p} features into {n_factors} factors")
    return [np.asarray(b) for b in np.array_split(np.arange(p), n_factors)]


def draw_covariance(spec: CovarianceSpec, p: int, rng: np.random.Generator) -> np.ndarray:
    """Raw symmetric unit-diagonal draw, before any PSD repair."""
    if p < 1:
        raise InvalidSpecError("p must be positive")
    if spec.kind == "identity":
        return np.eye(p)
    iu = np.triu_indices(p, k=1)
    if spec.kind == "random":
        upper = rng.uniform(*spec.off_diag_range, size=len(iu[0]))
    else:
        block_of = np.empty(p, dtype=int)
        for b, idx in enumerate(factor_blocks(p, spec.n_factors)):
            block_of[idx] = b
        same = block_of[iu[0]] == block_of[iu[1]]
        magnitude = rng.uniform(*spec.within_magnitude_range, size=len(iu[0]))
        sign = rng.choice([-1.0, 1.0], size=len(iu[0]))
        between = rng.uniform(*spec.between_range, size=len(iu[0]))
        upper = np.where(same, sign * magnitude, between)
    m = np.eye(p)
    m[iu] = upper
    m[iu[1], iu[0]] = upper
    return m


def build_covariance(spec: CovarianceSpec, p: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a covariance matrix per ``spec`` and repair it to a valid correlation matrix."""
    return nearest_psd(draw_covariance(spec, p, rng))


def _grid_covariances(cov_config: str, k: int, p: int, rng) -> list[np.ndarray]:
    factor3 = CovarianceSpec("factor", n_factors=3)
    factor4 = CovarianceSpec("factor", n_factors=4)
    random_ = CovarianceSpec("random")
    if cov_config == "none":
        return [np.eye(p)] * k
    if cov_config in ("random", "factor3", "factor4"):
        spec = {"random": random_, "factor3": factor3, "factor4": factor4}[cov_config]
        shared = build_covariance(spec, p, rng)
        return [shared] * k
    if cov_config == "mixed_factor":
        specs = [factor3, factor4, CovarianceSpec("identity")]
    elif cov_config == "mixed_random":
        specs = [random_, random_, CovarianceSpec("identity")]
    else:
        raise InvalidSpecError(f"unknown covariance config {cov_config!r}")
    return [build_covariance(s, p, rng) for s in specs[:k]]


def make_grid_population(
    k_config: GridConfig,
    d: float,
    n_diff: int,
    cov_config: GridCovConfig = "none",
    p: int = 15,
    rng: np.random.Generator | None = None,
) -> PopulationSpec:
    """Two or three subgroups differing by Cohen's ``d`` in the first ``n_diff`` features.

    Two subgroups get -d/2 and +d/2; three subgroups are a zero-mean middle
    group flanked by -d and +d. The sign order is shuffled per feature.
    """
    if k_config not in GRID_PROPORTIONS:
        raise InvalidSpecError(f"unknown grid config {k_config!r}")
    if not 0 <= n_diff <= p:
        raise InvalidSpecError(f"n_diff={n_diff} outside [0, {p}]")
    if d < 0:
        raise InvalidSpecError("d must be non-negative")
    rng = np.random.default_rng() if rng is None else rng
    proportions = GRID_PROPORTIONS[k_config]
    k = len(proportions)

    signs = rng.choice([-1.0, 1.0], size=n_diff)
    shift = np.zeros(p)
    if k == 2:
        shift[:n_diff] = signs * d / 2
        means = [-shift, shift]
    else:
        shift[:n_diff] = signs * d
        means = [-shift, np.zeros(p), shift]

    covs = _grid_covariances(cov_config, k, p, rng)
    subgroups = [SubgroupSpec(pr, mu, c) for pr, mu, c in zip(proportions, means, covs)]
    return PopulationSpec(p, subgroups)


def equidistant_centroids(k: int, delta: float, p: int = 2) -> np.ndarray:
    """Centroids with common nearest-neighbour separation ``delta``, centered at 0.

    k=4 in a plane cannot be equidistant; a square with side ``delta`` is used.
    """
    if not 1 <= k <= 4:
        raise InvalidSpecError("equidistant populations support k in 1..4")
    if k >= 3 and p < 2:
        raise InvalidSpecError("k >= 3 needs at least 2 features")
    if delta < 0:
        raise InvalidSpecError("delta must be non-negative")
    means = np.zeros((k, p))
    if k == 2:
        means[:, 0] = [-delta / 2, delta / 2]
    elif k == 3:
        r = delta / math.sqrt(3)
        angles = np.deg2rad([90.0, 210.0, 330.0])
        means[:, 0] = r * np.cos(angles)
        means[:, 1] = r * np.sin(angles)
    elif k == 4:
        h = delta / 2
        means[:, :2] = [[-h, -h], [h, -h], [-h, h], [h, h]]
    return means - means.mean(axis=0)


def make_equidistant_population(
    k: int,
    delta: float,
    proportions: Sequence[float] | None = None,
    p: int = 2,
    cov: CovarianceSpec = CovarianceSpec(),
    rng: np.random.Generator | None = None,
) -> PopulationSpec:
    if proportions is None:
        proportions = [1.0 / k] * k
    if len(proportions) != k:
        raise InvalidSpecError(f"{len(proportions)} proportions given for k={k}")
    means = equidistant_centroids(k, delta, p)
    if cov.kind == "identity":
        shared = np.eye(p)
    else:
        if rng is None:
            raise InvalidSpecError("a random covariance structure needs an rng")
        shared = build_covariance(cov, p, rng)
    subgroups = [SubgroupSpec(float(pr), mu, shared) for pr, mu in zip(proportions, means)]
    return PopulationSpec(p, subgroups)


def apportion(proportions: Sequence[float], n: int) -> np.ndarray:
    """Largest-remainder apportionment of ``n`` with every share at least 1."""
    k = len(proportions)
    if n < k:
        raise SamplingError(f"cannot give {k} subgroups at least one of {n} observations")
    raw = np.asarray(proportions, dtype=float) * n
    counts = np.floor(raw + 1e-9).astype(int)
    remainder = raw - counts
    # stable sort: ties go to the lower index
    for idx in np.argsort(-remainder, kind="stable")[: n - counts.sum()]:
        counts[idx] += 1
    while (counts < 1).any():
        counts[np.argmax(counts)] -= 1
        counts[np.argmin(counts)] += 1
    return counts


def _mvn_factor(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        return vecs * np.sqrt(np.clip(vals, 0, None))


def sample(pop: PopulationSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Draw ``n`` observations in total, shuffled, with ground-truth labels."""
    counts = apportion(pop.proportions, n)
    blocks, labels = [], []
    for label, (group, count) in enumerate(zip(pop.subgroups, counts)):
        z = rng.standard_normal((count, pop.n_features))
        blocks.append(group.mean + z @ _mvn_factor(group.covariance).T)
        labels.append(np.full(count, label))
    order = rng.permutation(n)
    data = np.concatenate(blocks)[order]
    truth = np.concatenate(labels)[order]
    return Dataset(data, truth)


def expected_separation(d_list: Sequence[float]) -> float:
    """Centroid distance implied by per-feature Cohen's d values: sqrt(sum d^2)."""
    d = np.asarray(list(d_list), dtype=float)
    if d.size == 0:
        return 0.0
    if (d < 0).any():
        raise ValueError("Cohen's d values must be non-negative")
    return float(math.sqrt(float(np.sum(d * d))))


def population_separation(pop: PopulationSpec) -> float:
    """Smallest pairwise distance between subgroup means (0 for one subgroup)."""
    if pop.k < 2:
        return 0.0
    return min(float(np.linalg.norm(a - b)) for a, b in combinations(pop.means, 2))

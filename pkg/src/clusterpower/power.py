"""Monte-Carlo power estimation for clustering pipelines.

One iteration draws a dataset from a population, optionally projects it
with MDS, fits the pipeline's algorithm over a range of k, keeps the k with
the highest (fuzzy) silhouette and calls the data "clustered" when that
score reaches the threshold. Power is the detection rate over iterations.

Every iteration's seed is a stable hash of (master seed, condition id,
iteration index), so results do not depend on execution order or on the
number of worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from . import datagen
from .cluster import (
    AlgorithmParams,
    ClusterSolution,
    agglomerative,
    cmeans,
    hdbscan,
    kmeans,
)
from .reduce import MDSParams, projected_separation
from .validate import (
    adjusted_rand,
    chance_level,
    classification_accuracy,
    fuzzy_silhouette,
    silhouette,
)

Algorithm = Literal["kmeans", "cmeans", "ward", "average_cosine", "hdbscan"]
ALGORITHMS = ("kmeans", "cmeans", "ward", "average_cosine", "hdbscan")
REDUCTIONS = ("none", "mds")

EQUIDISTANT_PROPORTIONS: dict[str, tuple[float, ...]] = {
    "one": (1.0,),
    "two_10_90": (0.1, 0.9),
    "two_50_50": (0.5, 0.5),
    "three_equal": (0.33, 0.34, 0.33),
    "four_equal": (0.25, 0.25, 0.25, 0.25),
}

REPORT_COLUMNS = [
    "config",
    "proportions",
    "delta",
    "N",
    "algorithm",
    "reduction",
    "n_iter",
    "power",
    "ci_lo",
    "ci_hi",
    "p_correct_k",
    "mean_accuracy",
    "chance",
]


@dataclass(frozen=True)
class PipelineSpec:
    algorithm: Algorithm = "kmeans"
    reduction: str = "none"
    k_range: tuple[int, int] = (2, 5)
    params: AlgorithmParams = AlgorithmParams()
    silhouette_threshold: float = 0.5
    mds: MDSParams = MDSParams()

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        lo, hi = self.k_range
        if self.algorithm != "hdbscan" and not 2 <= lo <= hi:
            raise ValueError(f"k_range {self.k_range} must satisfy 2 <= lo <= hi")


@dataclass
class Selection:
    best_k: int
    best_score: float
    solution: ClusterSolution | None
    scores: dict[int, float] = field(default_factory=dict)


@dataclass
class IterationOutcome:
    detected: bool
    best_k: int
    best_score: float
    accuracy: float
    seed_used: int
    chance: float = float("nan")


@dataclass
class PowerReport:
    config: str
    proportions: tuple[float, ...]
    delta: float
    n: int
    algorithm: str
    reduction: str
    k_true: int
    n_iter: int
    power: float
    ci_lo: float
    ci_hi: float
    p_correct_k: float
    mean_accuracy: float
    chance: float
    mean_score: float = float("nan")
    error: str | None = None
    outcomes: list[IterationOutcome] = field(default_factory=list, repr=False)

    def row(self) -> dict:
        return {
            "config": self.config,
            "proportions": format_proportions(self.proportions),
            "delta": f"{self.delta:g}",
            "N": self.n,
            "algorithm": self.algorithm,
            "reduction": self.reduction,
            "n_iter": self.n_iter,
            "power": _fmt(self.power),
            "ci_lo": _fmt(self.ci_lo),
            "ci_hi": _fmt(self.ci_hi),
            "p_correct_k": _fmt(self.p_correct_k),
            "mean_accuracy": _fmt(self.mean_accuracy),
            "chance": _fmt(self.chance),
        }


def _fmt(x: float) -> str:
    return "nan" if x is None or math.isnan(x) else f"{x:.4f}"


def format_proportions(props: Sequence[float]) -> str:
    return "/".join(f"{100 * p:g}" for p in props)


@dataclass(frozen=True)
class Condition:
    """One cell of a power study.

    ``kind="equidistant"`` uses ``config`` (a key of EQUIDISTANT_PROPORTIONS,
    or any label when ``proportions`` is given) and ``delta``. ``kind="grid"``
    builds a 15-feature population from ``d``, ``n_diff`` and ``cov_config``.
    """

    config: str
    n: int
    pipeline: PipelineSpec = PipelineSpec()
    delta: float = 0.0
    proportions: tuple[float, ...] | None = None
    kind: Literal["equidistant", "grid"] = "equidistant"
    p: int = 2
    cov: datagen.CovarianceSpec = datagen.CovarianceSpec()
    d: float = 0.0
    n_diff: int = 0
    cov_config: str = "none"

    @property
    def resolved_proportions(self) -> tuple[float, ...]:
        if self.kind == "grid":
            return datagen.GRID_PROPORTIONS[self.config]
        if self.proportions is not None:
            return tuple(self.proportions)
        if self.config not in EQUIDISTANT_PROPORTIONS:
            raise ValueError(f"unknown subgroup config {self.config!r}")
        return EQUIDISTANT_PROPORTIONS[self.config]

    @property
    def separation(self) -> float:
        if self.kind == "grid":
            return datagen.expected_separation([self.d] * self.n_diff)
        return self.delta

    @property
    def condition_id(self) -> str:
        pipe = self.pipeline
        parts = [
            self.kind,
            self.config,
            format_proportions(self.resolved_proportions),
            f"delta={self.delta:g}",
            f"N={self.n}",
            f"p={self.p}",
            f"cov={self.cov.kind}",
            pipe.algorithm,
            pipe.reduction,
            f"k={pipe.k_range[0]}-{pipe.k_range[1]}",
        ]
        if self.kind == "grid":
            parts += [f"d={self.d:g}", f"n_diff={self.n_diff}", self.cov_config]
        return "|".join(parts)

    def population(self, master_seed: int) -> datagen.PopulationSpec:
        rng = np.random.default_rng(stable_hash(master_seed, self.condition_id, "population"))
        if self.kind == "grid":
            return datagen.make_grid_population(
                self.config, self.d, self.n_diff, self.cov_config, self.p, rng
            )
        props = self.resolved_proportions
        return datagen.make_equidistant_population(len(props), self.delta, props, self.p, self.cov, rng)


def stable_hash(*parts) -> int:
    """63-bit integer hash of the parts' string forms; identical across runs and platforms."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") & (2**63 - 1)


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


def fit(algorithm: str, data: np.ndarray, k: int, params: AlgorithmParams, rng) -> ClusterSolution:
    if algorithm == "kmeans":
        return kmeans(data, k, params.kmeans, rng)
    if algorithm == "cmeans":
        return cmeans(data, k, params.cmeans, rng)
    if algorithm == "ward":
        return agglomerative(data, k, "ward", "euclidean")
    if algorithm == "average_cosine":
        return agglomerative(data, k, "average", "cosine")
    if algorithm == "hdbscan":
        return hdbscan(data, params.hdbscan)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def score_solution(data: np.ndarray, solution: ClusterSolution) -> float:
    """Fuzzy silhouette (alpha=1) for c-means, crisp silhouette otherwise."""
    if solution.membership is not None:
        return fuzzy_silhouette(data, solution.membership, alpha=1.0)
    return silhouette(data, solution.labels)[1]


def model_select(
    data: np.ndarray,
    algorithm: str,
    k_range: tuple[int, int] = (2, 5),
    params: AlgorithmParams | None = None,
    rng: np.random.Generator | None = None,
) -> Selection:
    """Pick the k with the highest silhouette; ties go to the smaller k.

    HDBSCAN skips the sweep and reports its own cluster count. When no k
    yields a defined score the selection has best_k=0 and a nan score.
    """
    params = params or AlgorithmParams()
    rng = np.random.default_rng() if rng is None else rng
    data = np.asarray(data, dtype=float)
    n = data.shape[0]

    if algorithm == "hdbscan":
        sol = fit("hdbscan", data, 0, params, rng)
        score = silhouette(data, sol.labels)[1]
        return Selection(sol.n_clusters_found, score, sol, {sol.n_clusters_found: score})

    lo, hi = k_range
    scores: dict[int, float] = {}
    best = Selection(0, float("nan"), None, scores)
    for k in range(lo, min(hi, n - 1) + 1):
        sol = fit(algorithm, data, k, params, rng)
        score = score_solution(data, sol)
        scores[k] = score
        if not math.isnan(score) and (best.solution is None or score > best.best_score):
            best = Selection(k, score, sol, scores)
    return best


def _analyse(dataset: datagen.Dataset, pipeline: PipelineSpec, rng, seed: int) -> IterationOutcome:
    data = dataset.data
    if pipeline.reduction == "mds":
        data = pipeline.mds.run(data, rng).coords
    chance = chance_level(dataset.truth)
    try:
        sel = model_select(data, pipeline.algorithm, pipeline.k_range, pipeline.params, rng)
    except ValueError:
        return IterationOutcome(False, 0, float("nan"), chance, seed, chance)
    if sel.solution is None or sel.solution.n_clusters_found == 0:
        return IterationOutcome(False, 0, float("nan"), chance, seed, chance)
    detected = bool(sel.best_score >= pipeline.silhouette_threshold)
    accuracy = classification_accuracy(sel.solution.labels, dataset.truth)
    return IterationOutcome(detected, sel.best_k, sel.best_score, accuracy, seed, chance)


def run_paired(
    pop: datagen.PopulationSpec, n: int, pipelines: Sequence[PipelineSpec], iteration_seed: int
) -> list[IterationOutcome]:
    """Analyse one shared dataset with several pipelines."""
    streams = np.random.SeedSequence(iteration_seed).spawn(1 + len(pipelines))
    dataset = datagen.sample(pop, n, np.random.default_rng(streams[0]))
    return [
        _analyse(dataset, pipe, np.random.default_rng(ss), iteration_seed)
        for pipe, ss in zip(pipelines, streams[1:])
    ]


def run_iteration(
    pop: datagen.PopulationSpec, n: int, pipeline: PipelineSpec, iteration_seed: int
) -> IterationOutcome:
    return run_paired(pop, n, [pipeline], iteration_seed)[0]


def _paired_task(args):
    pop, n, pipelines, seed = args
    return run_paired(pop, n, pipelines, seed)


def _map(fn, tasks: list, threads: int, executor: Executor | None):
    if executor is not None:
        return list(executor.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * max(threads, 1)))))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    return [fn(t) for t in tasks]


def iteration_seeds(master_seed: int, condition_id: str, n_iter: int) -> list[int]:
    return [stable_hash(master_seed, condition_id, i) for i in range(n_iter)]


def run_paired_iterations(
    pop, n, pipelines, n_iter, master_seed, condition_id, threads=1, executor=None
) -> list[list[IterationOutcome]]:
    """Outcomes indexed [iteration][pipeline]."""
    seeds = iteration_seeds(master_seed, condition_id, n_iter)
    tasks = [(pop, n, tuple(pipelines), s) for s in seeds]
    return _map(_paired_task, tasks, threads, executor)


def summarize(outcomes: Sequence[IterationOutcome], k_true: int) -> dict:
    n_iter = len(outcomes)
    hits = sum(o.detected for o in outcomes)
    lo, hi = wilson_interval(hits, n_iter)
    scores = [o.best_score for o in outcomes if not math.isnan(o.best_score)]
    return {
        "n_iter": n_iter,
        "power": hits / n_iter,
        "ci_lo": lo,
        "ci_hi": hi,
        "p_correct_k": sum(o.best_k == k_true for o in outcomes) / n_iter,
        "mean_accuracy": float(np.mean([o.accuracy for o in outcomes])),
        "chance": float(np.mean([o.chance for o in outcomes])),
        "mean_score": float(np.mean(scores)) if scores else float("nan"),
    }


def estimate_power(
    pop: datagen.PopulationSpec,
    n: int,
    pipeline: PipelineSpec,
    n_iter: int = 100,
    master_seed: int = 0,
    condition_id: str = "",
    threads: int = 1,
    executor: Executor | None = None,
    config: str = "",
    delta: float | None = None,
) -> PowerReport:
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    runs = run_paired_iterations(pop, n, [pipeline], n_iter, master_seed, condition_id, threads, executor)
    outcomes = [r[0] for r in runs]
    stats = summarize(outcomes, pop.k)
    sep = datagen.population_separation(pop) if delta is None else delta
    return PowerReport(
        config=config,
        proportions=pop.proportions,
        delta=sep,
        n=n,
        algorithm=pipeline.algorithm,
        reduction=pipeline.reduction,
        k_true=pop.k,
        outcomes=outcomes,
        **stats,
    )


def _failed_report(cond: Condition, n_iter: int, err: Exception) -> PowerReport:
    nan = float("nan")
    try:
        props = cond.resolved_proportions
    except (KeyError, ValueError):
        props = ()
    return PowerReport(
        cond.config, props, cond.separation, cond.n, cond.pipeline.algorithm,
        cond.pipeline.reduction, len(props), n_iter, nan, nan, nan, nan, nan, nan,
        error=f"{type(err).__name__}: {err}",
    )


def estimate_condition(
    cond: Condition, n_iter: int, master_seed: int, threads: int = 1, executor: Executor | None = None
) -> PowerReport:
    pop = cond.population(master_seed)
    return estimate_power(
        pop, cond.n, cond.pipeline, n_iter, master_seed, cond.condition_id,
        threads, executor, config=cond.config, delta=cond.separation,
    )


def sweep(
    conditions: Iterable[Condition],
    n_iter: int = 100,
    master_seed: int = 0,
    threads: int = 1,
    done: dict[str, PowerReport] | None = None,
) -> list[PowerReport]:
    """Estimate every cell in order. A failing cell yields a nan row with ``error`` set.

    ``done`` maps condition ids to finished reports, which are reused as-is
    so an interrupted sweep can resume.
    """
    conditions = list(conditions)
    if not conditions:
        raise ValueError("sweep needs at least one condition")
    done = done or {}
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    reports = []
    try:
        for cond in conditions:
            try:
                if cond.condition_id in done:
                    reports.append(done[cond.condition_id])
                    continue
                reports.append(estimate_condition(cond, n_iter, master_seed, threads, pool))
            except Exception as err:  # recorded in-row; the sweep carries on
                reports.append(_failed_report(cond, n_iter, err))
    finally:
        if pool is not None:
            pool.shutdown()
    return reports


def reports_to_csv(reports: Sequence[PowerReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    failed = sum(r.error is not None for r in reports)
    if failed:
        buf.write(f"# rows_failed: {failed}\n")
        for r in reports:
            if r.error is not None:
                buf.write(f"# {r.config} N={r.n} delta={r.delta:g}: {r.error}\n")
    return buf.getvalue()


def reports_to_json(reports: Sequence[PowerReport]) -> str:
    rows = []
    for r in reports:
        row = r.row()
        for key in ("power", "ci_lo", "ci_hi", "p_correct_k", "mean_accuracy", "chance"):
            row[key] = None if row[key] == "nan" else float(row[key])
        row["delta"] = r.delta
        row["error"] = r.error
        rows.append(row)
    failed = sum(r.error is not None for r in reports)
    return json.dumps({"rows": rows, "rows_failed": failed}, indent=2) + "\n"


@dataclass
class GridCellResult:
    config: str
    d: float
    n_diff: int
    cov_config: str
    reduction: str
    algorithm: str
    expected_delta: float
    sample_delta: float
    projected_delta: float
    silhouette: float
    ari: float


def grid_cell(
    config: str,
    d: float,
    n_diff: int,
    cov_config: str,
    reduction: str = "mds",
    algorithm: str = "kmeans",
    n: int = 1000,
    seed: int = 0,
    params: AlgorithmParams | None = None,
    mds_params: MDSParams = MDSParams(),
) -> GridCellResult:
    """One grid-dataset surface cell: separation before/after reduction, silhouette, ARI.

    k-requiring algorithms are fitted with the true number of subgroups.
    """
    params = params or AlgorithmParams()
    streams = np.random.SeedSequence(seed).spawn(3)
    pop = datagen.make_grid_population(config, d, n_diff, cov_config, 15, np.random.default_rng(streams[0]))
    ds = datagen.sample(pop, n, np.random.default_rng(streams[1]))
    rng = np.random.default_rng(streams[2])
    data = ds.data
    if reduction == "mds":
        data = mds_params.run(data, rng).coords
    sol = fit(algorithm, data, pop.k, params, rng)
    return GridCellResult(
        config, d, n_diff, cov_config, reduction, algorithm,
        expected_delta=datagen.population_separation(pop),
        sample_delta=projected_separation(ds.data, ds.truth),
        projected_delta=projected_separation(data, ds.truth),
        silhouette=score_solution(data, sol),
        ari=adjusted_rand(sol.labels, ds.truth),
    )


def grid_cell_row(result: GridCellResult) -> dict:
    return asdict(result)

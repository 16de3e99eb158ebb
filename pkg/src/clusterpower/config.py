"""YAML run configuration for power studies.

Every key is documented in ``KNOWN_KEYS``; anything else is rejected so a
typo cannot silently fall back to a default. Errors carry the YAML line and
the dotted field path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import yaml

from .cluster import AlgorithmParams, CMeansParams, HDBSCANParams, KMeansParams
from .datagen import GRID_PROPORTIONS, CovarianceSpec
from .power import ALGORITHMS, EQUIDISTANT_PROPORTIONS, REDUCTIONS, Condition, PipelineSpec
from .reduce import MDSParams

KNOWN_KEYS = {
    "population": {"kind", "config", "proportions", "p", "covariance", "n_factors", "cov_config"},
    "pipeline": {"reduction", "algorithm", "k_range", "silhouette_threshold", "params"},
    "pipeline.params": {"kmeans", "cmeans", "hdbscan", "mds"},
    "pipeline.params.kmeans": {"n_init", "max_iter", "tol"},
    "pipeline.params.cmeans": {"m", "max_iter", "tol", "n_init"},
    "pipeline.params.hdbscan": {"min_cluster_size", "min_samples"},
    "pipeline.params.mds": {"n_init", "max_iter", "tol", "init"},
    "simulation": {"N", "delta", "d", "n_diff", "n_iter", "master_seed"},
    "output": {"format", "path"},
    "": {"population", "pipeline", "simulation", "output"},
}


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "", line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(f"field {path}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line


def _key_lines(node, prefix="", out=None) -> dict[str, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = f"{prefix}.{key.value}" if prefix else str(key.value)
            out[path] = key.start_mark.line + 1
            _key_lines(value, path, out)
    return out


@dataclass
class RunConfig:
    kind: str = "equidistant"
    configs: list[str] = field(default_factory=lambda: ["two_50_50"])
    proportions: tuple[float, ...] | None = None
    p: int = 2
    covariance: CovarianceSpec = CovarianceSpec()
    cov_config: str = "none"
    pipeline: PipelineSpec = PipelineSpec()
    ns: list[int] = field(default_factory=lambda: [20])
    deltas: list[float] = field(default_factory=lambda: [4.0])
    ds: list[float] = field(default_factory=list)
    n_diffs: list[int] = field(default_factory=list)
    n_iter: int = 100
    master_seed: int = 0
    output_format: str = "csv"
    output_path: str | None = None

    def conditions(self) -> list[Condition]:
        if self.kind == "grid":
            return [
                Condition(cfg, n, self.pipeline, kind="grid", p=self.p, d=d, n_diff=nd,
                          cov_config=self.cov_config)
                for cfg, n, d, nd in product(self.configs, self.ns, self.ds, self.n_diffs)
            ]
        return [
            Condition(cfg, n, self.pipeline, delta, self.proportions, p=self.p, cov=self.covariance)
            for cfg, n, delta in product(self.configs, self.ns, self.deltas)
        ]


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def parse_config(text: str) -> RunConfig:
    try:
        lines = _key_lines(yaml.compose(text)) if text.strip() else {}
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(err, 'problem', err)}", line=mark.line + 1 if mark else None)
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")

    def fail(msg, path):
        raise ConfigError(msg, path, lines.get(path))

    def check_keys(mapping, prefix):
        if not isinstance(mapping, dict):
            fail("expected a mapping", prefix)
        for key in mapping:
            path = f"{prefix}.{key}" if prefix else str(key)
            if key not in KNOWN_KEYS[prefix]:
                fail(f"unknown key {key!r}", path)

    def typed(section, key, kind, default, path_prefix):
        path = f"{path_prefix}.{key}"
        if key not in section:
            return default
        try:
            return kind(section[key])
        except (TypeError, ValueError):
            fail(f"expected {kind.__name__}, got {section[key]!r}", path)

    check_keys(raw, "")
    pop = raw.get("population", {}) or {}
    pipe = raw.get("pipeline", {}) or {}
    sim = raw.get("simulation", {}) or {}
    out = raw.get("output", {}) or {}
    for name, section in (("population", pop), ("pipeline", pipe), ("simulation", sim), ("output", out)):
        check_keys(section, name)

    cfg = RunConfig()
    cfg.kind = pop.get("kind", "equidistant")
    if cfg.kind not in ("equidistant", "grid"):
        fail(f"kind must be 'equidistant' or 'grid', got {cfg.kind!r}", "population.kind")
    valid = GRID_PROPORTIONS if cfg.kind == "grid" else EQUIDISTANT_PROPORTIONS
    cfg.configs = [str(c) for c in _as_list(pop.get("config", "two_50_50"))]
    if "proportions" in pop:
        if cfg.kind == "grid":
            fail("grid populations use fixed proportions", "population.proportions")
        try:
            cfg.proportions = tuple(float(x) for x in pop["proportions"])
        except (TypeError, ValueError):
            fail("expected a list of numbers", "population.proportions")
        if abs(sum(cfg.proportions) - 1) > 1e-9 or len(cfg.proportions) > 4:
            fail("proportions must sum to 1 with at most 4 subgroups", "population.proportions")
    else:
        for c in cfg.configs:
            if c not in valid:
                fail(f"unknown config {c!r}; choose from {sorted(valid)}", "population.config")
    cfg.p = typed(pop, "p", int, 15 if cfg.kind == "grid" else 2, "population")
    cov_kind = pop.get("covariance", "identity")
    if cov_kind not in ("identity", "random", "factor"):
        fail(f"unknown covariance {cov_kind!r}", "population.covariance")
    cfg.covariance = CovarianceSpec(cov_kind, n_factors=typed(pop, "n_factors", int, 3, "population"))
    cfg.cov_config = pop.get("cov_config", "none")
    if cfg.cov_config not in ("none", "random", "factor3", "factor4", "mixed_factor", "mixed_random"):
        fail(f"unknown cov_config {cfg.cov_config!r}", "population.cov_config")

    algorithm = pipe.get("algorithm", "kmeans")
    if algorithm not in ALGORITHMS:
        fail(f"unknown algorithm {algorithm!r}; choose from {list(ALGORITHMS)}", "pipeline.algorithm")
    reduction = pipe.get("reduction", "none")
    if reduction not in REDUCTIONS:
        fail(f"unknown reduction {reduction!r}", "pipeline.reduction")
    k_range = pipe.get("k_range", [2, 5])
    if not (isinstance(k_range, list) and len(k_range) == 2 and all(isinstance(k, int) for k in k_range)
            and 2 <= k_range[0] <= k_range[1]):
        fail("k_range must be [lo, hi] with 2 <= lo <= hi", "pipeline.k_range")

    params = pipe.get("params", {}) or {}
    check_keys(params, "pipeline.params")
    built = {}
    for name, cls in (("kmeans", KMeansParams), ("cmeans", CMeansParams), ("hdbscan", HDBSCANParams), ("mds", MDSParams)):
        section = params.get(name, {}) or {}
        check_keys(section, f"pipeline.params.{name}")
        try:
            built[name] = cls(**section)
        except (TypeError, ValueError) as err:
            fail(str(err), f"pipeline.params.{name}")
    cfg.pipeline = PipelineSpec(
        algorithm=algorithm,
        reduction=reduction,
        k_range=tuple(k_range),
        params=AlgorithmParams(built["kmeans"], built["cmeans"], built["hdbscan"]),
        silhouette_threshold=typed(pipe, "silhouette_threshold", float, 0.5, "pipeline"),
        mds=built["mds"],
    )

    try:
        cfg.ns = [int(n) for n in _as_list(sim.get("N", [20]))]
        cfg.deltas = [float(d) for d in _as_list(sim.get("delta", [4.0]))]
        cfg.ds = [float(d) for d in _as_list(sim.get("d", []))]
        cfg.n_diffs = [int(n) for n in _as_list(sim.get("n_diff", []))]
    except (TypeError, ValueError) as err:
        fail(f"expected numbers: {err}", "simulation")
    if any(d < 0 for d in cfg.deltas + cfg.ds):
        fail("separations must be non-negative", "simulation.delta")
    if cfg.kind == "grid" and (not cfg.ds or not cfg.n_diffs):
        fail("grid populations need simulation.d and simulation.n_diff", "simulation")
    cfg.n_iter = typed(sim, "n_iter", int, 100, "simulation")
    if cfg.n_iter < 1:
        fail("n_iter must be at least 1", "simulation.n_iter")
    cfg.master_seed = typed(sim, "master_seed", int, 0, "simulation")

    cfg.output_format = out.get("format", "csv")
    if cfg.output_format not in ("csv", "json"):
        fail("format must be csv or json", "output.format")
    cfg.output_path = out.get("path")
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())

"""Published study grids and their reference values."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .power import (
    Condition,
    PipelineSpec,
    PowerReport,
    format_proportions,
    run_paired_iterations,
    summarize,
    sweep,
)

PRESETS = ("table1", "table2", "cmeans_text", "figure11")
TABLE_CONFIGS = ("two_10_90", "two_50_50", "three_equal", "four_equal")
TABLE_NS = (10, 20, 40, 80, 160)
TABLE_DELTAS = tuple(float(d) for d in range(1, 11))
FIGURE11_DELTAS = tuple(float(x) for x in np.arange(1.0, 10.01, 0.5))
FIGURE11_CONFIGS = ("one", "two_50_50", "three_equal", "four_equal")
DEFAULT_TOLERANCE = 12.0  # percentage points
REQUIRED_FRACTION = 0.9


def reference_values(preset: str | None = None) -> dict[tuple[str, str, int, float], float]:
    """Map (algorithm, config, N, delta) -> published power in percent."""
    text = resources.files("clusterpower").joinpath("data/reference_power.csv").read_text()
    rows = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
    out = {}
    for r in rows:
        if preset is None or r["preset"] == preset:
            key = (r["algorithm"], r["config"], int(r["N"]), float(r["delta"]))
            out[key] = float(r["reference_power"])
    return out


def table_conditions(algorithm: str) -> list[Condition]:
    pipe = PipelineSpec(algorithm)
    return [
        Condition(cfg, n, pipe, delta)
        for cfg in TABLE_CONFIGS
        for n in TABLE_NS
        for delta in TABLE_DELTAS
    ]


def cmeans_text_conditions() -> list[Condition]:
    pipe = PipelineSpec("cmeans")
    return [
        Condition(cfg, n, pipe, delta)
        for (_, cfg, n, delta) in reference_values("cmeans_text")
    ]


def preset_conditions(preset: str) -> list[Condition]:
    if preset == "table1":
        return table_conditions("kmeans")
    if preset == "table2":
        return table_conditions("hdbscan")
    if preset == "cmeans_text":
        return cmeans_text_conditions()
    raise ValueError(f"preset {preset!r} is not a plain power sweep")


@dataclass
class CellDiff:
    report: PowerReport
    reference: float
    difference: float
    within: bool


def diff_against_reference(
    reports: list[PowerReport], preset: str, tolerance: float = DEFAULT_TOLERANCE
) -> list[CellDiff]:
    refs = reference_values(preset)
    diffs = []
    for r in reports:
        key = (r.algorithm, r.config, r.n, float(r.delta))
        if key not in refs:
            continue
        got = 100 * r.power
        delta = abs(got - refs[key]) if not math.isnan(got) else float("inf")
        diffs.append(CellDiff(r, refs[key], delta, delta <= tolerance))
    return diffs


def diff_summary(diffs: list[CellDiff], tolerance: float = DEFAULT_TOLERANCE) -> str:
    buf = io.StringIO()
    buf.write("config,proportions,delta,N,algorithm,estimate,reference,abs_diff,within_tolerance\n")
    for c in diffs:
        r = c.report
        buf.write(
            f"{r.config},{format_proportions(r.proportions)},{r.delta:g},{r.n},{r.algorithm},"
            f"{100 * r.power:.1f},{c.reference:g},{c.difference:.1f},{'yes' if c.within else 'no'}\n"
        )
    n_ok = sum(c.within for c in diffs)
    frac = n_ok / len(diffs) if diffs else float("nan")
    verdict = "PASS" if diffs and frac >= REQUIRED_FRACTION else "FAIL"
    buf.write(
        f"# {n_ok}/{len(diffs)} cells within +/-{tolerance:g} points ({100 * frac:.1f}%); "
        f"{verdict} at >= {100 * REQUIRED_FRACTION:.0f}%\n"
    )
    return buf.getvalue()


@dataclass
class ComparisonRow:
    config: str
    k_true: int
    delta: float
    n: int
    n_iter: int
    crisp_mean: float
    crisp_ci_lo: float
    crisp_ci_hi: float
    fuzzy_mean: float
    fuzzy_ci_lo: float
    fuzzy_ci_hi: float
    crisp_power: float
    fuzzy_power: float
    crisp_p_correct_k: float
    fuzzy_p_correct_k: float

    @property
    def inflation(self) -> float:
        return self.fuzzy_mean - self.crisp_mean


def _mean_ci(values) -> tuple[float, float, float]:
    v = np.asarray([x for x in values if not math.isnan(x)])
    if v.size == 0:
        return (float("nan"),) * 3
    m = float(v.mean())
    if v.size < 2:
        return m, m, m
    half = 1.959963984540054 * float(v.std(ddof=1)) / math.sqrt(v.size)
    return m, m - half, m + half


def crisp_vs_fuzzy(
    config: str,
    delta: float,
    n: int = 120,
    n_iter: int = 100,
    master_seed: int = 0,
    k_range: tuple[int, int] = (2, 7),
    threads: int = 1,
) -> ComparisonRow:
    """k-means (silhouette) and c-means (fuzzy silhouette) on the same datasets."""
    km = PipelineSpec("kmeans", k_range=k_range)
    cm = PipelineSpec("cmeans", k_range=k_range)
    cond = Condition(config, n, km, delta)
    pop = cond.population(master_seed)
    runs = run_paired_iterations(pop, n, [km, cm], n_iter, master_seed, cond.condition_id + "|paired", threads)
    crisp = [r[0] for r in runs]
    fuzzy = [r[1] for r in runs]
    cs, fs = summarize(crisp, pop.k), summarize(fuzzy, pop.k)
    return ComparisonRow(
        config, pop.k, delta, n, n_iter,
        *_mean_ci(o.best_score for o in crisp),
        *_mean_ci(o.best_score for o in fuzzy),
        cs["power"], fs["power"], cs["p_correct_k"], fs["p_correct_k"],
    )


def figure11(n_iter: int = 100, master_seed: int = 0, threads: int = 1, deltas=FIGURE11_DELTAS):
    rows = []
    for config in FIGURE11_CONFIGS:
        # no subgroups: separation is meaningless, one row suffices
        for delta in (0.0,) if config == "one" else deltas:
            rows.append(crisp_vs_fuzzy(config, delta, 120, n_iter, master_seed, threads=threads))
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    cols = list(ComparisonRow.__dataclass_fields__)
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_cell(c, getattr(r, c)) for c in cols) + "\n")
    return buf.getvalue()


def _cell(column: str, value) -> str:
    if column == "delta":
        return f"{value:g}"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def figure11_diff(rows: list[ComparisonRow], tolerance: float = DEFAULT_TOLERANCE) -> str:
    refs = reference_values("figure11")
    null = [r for r in rows if r.config == "one"]
    lines = ["algorithm,estimate,reference,abs_diff,within_tolerance"]
    for r in null:
        for algo, est in (("kmeans", r.crisp_power), ("cmeans", r.fuzzy_power)):
            ref = refs[(algo, "one", r.n, 0.0)]
            diff = abs(100 * est - ref)
            lines.append(f"{algo},{100 * est:.1f},{ref:g},{diff:.1f},{'yes' if diff <= tolerance else 'no'}")
    return "\n".join(lines) + "\n"


def run_preset(preset: str, n_iter: int = 100, master_seed: int = 0, threads: int = 1) -> list[PowerReport]:
    return sweep(preset_conditions(preset), n_iter, master_seed, threads)

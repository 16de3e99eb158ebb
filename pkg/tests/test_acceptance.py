"""Acceptance criteria, one test per criterion, all at master seed 0.

Each test records a PASS/FAIL line that the terminal summary prints under
"acceptance criteria". The Monte-Carlo criteria use 100 iterations per cell
and take several minutes in total on one core.
"""

import math
import os

import numpy as np
import pytest
from conftest import ACCEPTANCE
from scipy.spatial.distance import pdist
from test_hdbscan import naive_prim_weight
from test_kmeans import brute_force_two_means
from test_validate import brute_silhouette, pair_counting_ari

from clusterpower import datagen as dg
from clusterpower.cli import main
from clusterpower.cluster import KMeansParams, kmeans, minimum_spanning_tree, mutual_reachability
from clusterpower.power import Condition, PipelineSpec, grid_cell, sweep
from clusterpower.presets import crisp_vs_fuzzy, reference_values, table_conditions
from clusterpower.reduce import mds
from clusterpower.validate import adjusted_rand, silhouette

SEED = 0
N_ITER = 100
TOL = 12.0
THREADS = os.cpu_count() or 1


def record(label, ok, detail):
    ACCEPTANCE[label] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, detail


def test_1_separation_formula():
    d = [0.3] * 20 + [0.5] * 12 + [0.8] * 4
    got = dg.expected_separation(d)
    record("1 separation", abs(got - 2.713) <= 1e-3, f"{got:.4f} (target 2.713 +/- 0.001)")


def test_2_kmeans_table():
    refs = reference_values("table1")
    anchors = {
        ("two_50_50", 20, 4.0), ("two_50_50", 10, 4.0), ("two_10_90", 20, 5.0),
        ("two_10_90", 10, 5.0), ("three_equal", 80, 4.0), ("four_equal", 80, 4.0),
    }
    conds = [c for c in table_conditions("kmeans") if c.delta >= 7 or (c.config, c.n, c.delta) in anchors]
    reports = sweep(conds, N_ITER, SEED, THREADS)
    misses = []
    for r in reports:
        ref = refs[("kmeans", r.config, r.n, r.delta)]
        if abs(100 * r.power - ref) > TOL:
            misses.append(f"{r.config} N={r.n} delta={r.delta:g}: {100 * r.power:.0f} vs {ref:g}")
    anchor_text = ", ".join(
        f"{r.config}/N{r.n}/d{r.delta:g}={100 * r.power:.0f}"
        for r in reports if (r.config, r.n, r.delta) in anchors
    )
    record(
        "2 k-means table",
        not misses,
        f"{len(reports) - len(misses)}/{len(reports)} cells within +/-{TOL:g} (anchors {anchor_text})"
        + (f"; misses: {misses}" if misses else ""),
    )


def test_3_hdbscan_table():
    refs = reference_values("table2")
    hd = PipelineSpec("hdbscan")
    tiny = [c for c in table_conditions("hdbscan") if c.n == 10]
    anchors = [Condition("two_50_50", 40, hd, 3.0), Condition("two_50_50", 80, hd, 3.0), Condition("two_10_90", 80, hd, 6.0)]
    reports = sweep(tiny + anchors, N_ITER, SEED, THREADS)
    tiny_max = max(r.power for r in reports[: len(tiny)])
    diffs = [(r, abs(100 * r.power - refs[("hdbscan", r.config, r.n, r.delta)])) for r in reports[len(tiny):]]
    ok = tiny_max == 0 and all(d <= TOL for _, d in diffs)
    detail = f"N=10 max power {tiny_max:.2f} over {len(tiny)} cells; " + ", ".join(
        f"{r.config}/N{r.n}/d{r.delta:g}={100 * r.power:.0f} (ref {refs[('hdbscan', r.config, r.n, r.delta)]:g})"
        for r, _ in diffs
    )
    record("3 HDBSCAN table", ok, detail)


def test_4_cmeans_values():
    cm = PipelineSpec("cmeans")
    cells = [("two_50_50", 10, 3.0, 77), ("two_50_50", 20, 3.0, 82), ("two_10_90", 20, 5.0, 81)]
    reports = sweep([Condition(c, n, cm, d) for c, n, d, _ in cells], N_ITER, SEED, THREADS)
    parts, ok = [], True
    for r, (_, _, _, ref) in zip(reports, cells):
        ok &= abs(100 * r.power - ref) <= TOL
        parts.append(f"{r.config}/N{r.n}/d{r.delta:g}={100 * r.power:.0f} (ref {ref})")
    record("4 c-means values", ok, ", ".join(parts))


def test_5_false_positive_control():
    row = crisp_vs_fuzzy("one", 0.0, n=120, n_iter=N_ITER, master_seed=SEED, threads=THREADS)
    ok = row.crisp_power <= 0.03 and row.fuzzy_power <= 0.06
    record("5 false positives", ok, f"k-means {100 * row.crisp_power:.0f}% (<=3), c-means {100 * row.fuzzy_power:.0f}% (<=6)")


def test_6_fuzzy_inflation_shrinks():
    deltas = (2.0, 3.0, 4.0, 6.0, 8.0)
    ok, parts = True, []
    for config in ("two_50_50", "three_equal"):
        rows = [crisp_vs_fuzzy(config, d, n=120, n_iter=N_ITER, master_seed=SEED, threads=THREADS) for d in deltas]
        gaps = [r.inflation for r in rows]
        ok &= all(g >= 0 for g, d in zip(gaps, deltas) if d <= 4)
        ok &= all(a >= b for a, b in zip(gaps, gaps[1:]))
        parts.append(f"{config} gaps " + " ".join(f"d{d:g}:{g:+.3f}" for d, g in zip(deltas, gaps)))
    record("6 fuzzy vs crisp", ok, "; ".join(parts))


def test_7_oracle_suites():
    rng = np.random.default_rng(SEED)
    checks = {}

    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 9))
        x = rng.normal(size=(n, 2))
        labels = rng.integers(-1, 3, size=n)
        if len(set(labels) - {-1}) < 2:
            continue
        per, _ = silhouette(x, labels)
        for i, v in brute_silhouette(x, labels).items():
            worst = max(worst, abs(per[i] - v))
    checks["silhouette"] = worst <= 1e-9

    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 11))
        a, b = rng.integers(-1, 4, size=n), rng.integers(-1, 4, size=n)
        worst = max(worst, abs(adjusted_rand(a, b) - pair_counting_ari(list(a), list(b))))
    checks["ari"] = worst <= 1e-9

    ok = True
    for s in range(20):
        n = int(rng.integers(5, 13))
        x = rng.normal(size=(n, 2))
        sol = kmeans(x, 2, KMeansParams(n_init=50), np.random.default_rng(s))
        ok &= math.isclose(sol.objective, brute_force_two_means(x), rel_tol=1e-9, abs_tol=1e-12)
    checks["kmeans optimum"] = ok

    ok = True
    for n in (5, 20, 60, 120, 200):
        mr = mutual_reachability(rng.normal(size=(n, 3)), min(5, n - 1))
        ok &= math.isclose(minimum_spanning_tree(mr)[:, 2].sum(), naive_prim_weight(mr.tolist()), rel_tol=1e-12)
    checks["hdbscan mst"] = ok

    # any stress increase inside SMACOF raises MonotonicityError
    for _ in range(30):
        mds(rng.normal(size=(int(rng.integers(4, 40)), int(rng.integers(2, 8)))), n_init=2, rng=rng)
    pts = np.zeros((3, 5))
    pts[1, 0], pts[2, 1] = 3.0, 4.0
    embedded = sorted(pdist(mds(pts, rng=rng).coords))
    checks["smacof"] = np.allclose(embedded, [3, 4, 5], atol=1e-3)

    ok = True
    for _ in range(1000):
        spec = dg.CovarianceSpec(str(rng.choice(["identity", "random", "factor"])), n_factors=int(rng.integers(1, 5)))
        m = dg.build_covariance(spec, int(rng.integers(4, 21)), rng)
        ok &= np.linalg.eigvalsh(m).min() >= -1e-9 and np.allclose(np.diag(m), 1) and np.array_equal(m, m.T)
    checks["covariance psd"] = ok

    failed = [k for k, v in checks.items() if not v]
    record("7 oracle suites", not failed, f"{len(checks) - len(failed)}/{len(checks)} suites agree" + (f"; failed: {failed}" if failed else ""))


def test_8_mds_separation_inflation():
    covs = {"two_10_90": "random", "two_50_50": "none", "three_equal": "mixed_factor"}
    gaps, i = [], 0
    for config, cov in covs.items():
        for d in (0.5, 0.8, 1.3, 2.1):
            for n_diff in (5, 10, 15):
                if not 2 <= d * math.sqrt(n_diff) <= 8:
                    continue
                res = grid_cell(config, d, n_diff, cov, reduction="mds", n=1000, seed=SEED + i)
                gaps.append(res.projected_delta - res.expected_delta)
                i += 1
    med = float(np.median(gaps))
    record("8 MDS inflation", len(gaps) >= 20 and 0 < med < 2, f"median projected-minus-original {med:.3f} over {len(gaps)} datasets")


def test_9_thread_determinism(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(
        "population: {config: [two_50_50, three_equal]}\n"
        "pipeline: {algorithm: cmeans}\n"
        "simulation: {N: 30, delta: [2, 4], n_iter: 20, master_seed: 5}\n"
    )
    outs = []
    for threads in (1, 2):
        out = tmp_path / f"t{threads}.csv"
        assert main(["power", "--config", str(cfg), "--threads", str(threads), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    record("9 determinism", outs[0] == outs[1], f"--threads 1 vs 2: {'identical' if outs[0] == outs[1] else 'different'} ({len(outs[0])} bytes)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

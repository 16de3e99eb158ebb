import csv
import subprocess
import sys

import numpy as np
import pytest

from clusterpower.cli import main


def write(path, text):
    path.write_text(text)
    return str(path)


def read_csv(path):
    lines = [line for line in open(path) if not line.startswith("#")]
    return list(csv.DictReader(lines))


# --- separation ------------------------------------------------------------------


@pytest.mark.parametrize(
    "args, expected",
    [
        (["-d", "0.3x20", "-d", "0.5x12", "-d", "0.8x4"], "2.7129"),
        (["-d", "2.0"], "2.0000"),
        (["-d", "0", "-d", "0"], "0.0000"),
    ],
)
def test_separation(capsys, args, expected):
    assert main(["separation", *args]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_separation_from_file(tmp_path, capsys):
    f = write(tmp_path / "d.txt", "0.3x20 0.5x12\n0.8x4\n")
    assert main(["separation", "--file", f]) == 0
    assert capsys.readouterr().out.strip() == "2.7129"


def test_separation_rejects_negative(capsys):
    assert main(["separation", "-d", "-0.5"]) == 2
    assert "non-negative" in capsys.readouterr().err


def test_separation_needs_values():
    assert main(["separation"]) == 2


# --- simulate ----------------------------------------------------------------------


def test_simulate_two_equal_groups(tmp_path):
    out = tmp_path / "ds.csv"
    code = main(["simulate", "--k-config", "two_50_50", "--delta", "4", "--n", "20", "--seed", "1", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 20 and list(rows[0]) == ["f1", "f2", "truth"]
    assert sorted(np.bincount([int(r["truth"]) for r in rows])) == [10, 10]


def test_simulate_minority_group_of_one(tmp_path):
    out = tmp_path / "ds.csv"
    assert main(["simulate", "--k-config", "two_10_90", "--n", "10", "--out", str(out)]) == 0
    counts = np.bincount([int(r["truth"]) for r in read_csv(out)])
    assert sorted(counts) == [1, 9]


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["simulate", "--k-config", "three_equal", "--n", "30", "--seed", "7", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_unwritable_path(tmp_path):
    assert main(["simulate", "--out", str(tmp_path / "missing" / "ds.csv")]) == 3


def test_simulate_grid_config(tmp_path):
    cfg = write(tmp_path / "g.yaml", "population: {kind: grid, config: two_50_50}\nsimulation: {N: 50, d: 1.3, n_diff: 10}\n")
    out = tmp_path / "ds.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 50 and list(rows[0])[-1] == "truth" and len(rows[0]) == 16


# --- power -----------------------------------------------------------------------


def test_power_well_separated(tmp_path):
    cfg = write(tmp_path / "c.yaml", "simulation: {N: 160, delta: 10, n_iter: 20}\n")
    out = tmp_path / "r.csv"
    assert main(["power", "--config", cfg, "--out", str(out)]) == 0
    (row,) = read_csv(out)
    assert row["power"] == "1.0000"
    assert row["algorithm"] == "kmeans" and row["N"] == "160"


def test_power_null_population(tmp_path):
    cfg = write(tmp_path / "c.yaml", "population: {config: one}\nsimulation: {N: 40, n_iter: 40}\n")
    out = tmp_path / "r.csv"
    assert main(["power", "--config", cfg, "--out", str(out)]) == 0
    assert float(read_csv(out)[0]["power"]) <= 0.05


def test_power_hdbscan_tiny_cells(tmp_path):
    cfg = write(
        tmp_path / "c.yaml",
        "population: {config: [two_50_50, four_equal]}\npipeline: {algorithm: hdbscan}\n"
        "simulation: {N: 10, delta: [2, 6, 10], n_iter: 10}\n",
    )
    out = tmp_path / "r.csv"
    assert main(["power", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 6 and all(r["power"] == "0.0000" for r in rows)


def test_power_json_and_stdout(tmp_path, capsys):
    cfg = write(tmp_path / "c.yaml", "simulation: {N: 20, delta: 6, n_iter: 5}\n")
    assert main(["power", "--config", cfg, "--format", "json"]) == 0
    assert '"rows_failed": 0' in capsys.readouterr().out


def test_power_invalid_config(tmp_path, capsys):
    cfg = write(tmp_path / "c.yaml", "pipeline:\n  algorithm: kmeans\n  linkage: ward\n")
    assert main(["power", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "pipeline.linkage" in err


def test_power_missing_config(tmp_path):
    assert main(["power", "--config", str(tmp_path / "nope.yaml")]) == 3


def test_power_bad_threads(tmp_path):
    cfg = write(tmp_path / "c.yaml", "")
    assert main(["power", "--config", cfg, "--threads", "0"]) == 2


# --- reproduce -------------------------------------------------------------------


def test_reproduce_cmeans_text(tmp_path, capsys):
    prefix = tmp_path / "cm"
    assert main(["reproduce", "cmeans_text", "--out", str(prefix)]) == 0
    summary = capsys.readouterr().out
    assert "cells within" in summary
    report = read_csv(f"{prefix}_report.csv")
    assert len(report) == 8
    diff = read_csv(f"{prefix}_diff.csv")
    cell = next(r for r in diff if r["proportions"] == "50/50" and r["N"] == "20" and r["delta"] == "3")
    assert float(cell["reference"]) == 82
    assert float(cell["abs_diff"]) <= 10


# --- mds ---------------------------------------------------------------------------


def test_mds_triangle(tmp_path, capsys):
    src = write(tmp_path / "tri.csv", "a,b\n0,0\n1,0\n0.5,0.8660254037844386\n")
    out = tmp_path / "p.csv"
    assert main(["mds", src, "--out", str(out)]) == 0
    stress = float(capsys.readouterr().err.split()[0].split("=")[1])
    assert stress < 1e-6
    assert read_csv(out)[0].keys() == {"x", "y"}


def test_mds_three_points_five_dims(tmp_path):
    src = write(tmp_path / "p.csv", "f1,f2,f3,f4,f5\n0,0,0,0,0\n3,0,0,0,0\n0,4,0,0,0\n")
    out = tmp_path / "o.csv"
    assert main(["mds", src, "--out", str(out)]) == 0
    xy = np.loadtxt(out, delimiter=",", skiprows=1)
    d = sorted(np.linalg.norm(xy[i] - xy[j]) for i, j in ((0, 1), (0, 2), (1, 2)))
    np.testing.assert_allclose(d, [3, 4, 5], atol=1e-3)


def test_mds_non_numeric(tmp_path):
    src = write(tmp_path / "bad.csv", "a,b\n1,2\nx,3\n1,1\n")
    assert main(["mds", src, "--out", str(tmp_path / "o.csv")]) == 2


def test_mds_grid_dataset_separation(tmp_path, capsys):
    cfg = write(tmp_path / "g.yaml", "population: {kind: grid, config: two_50_50}\nsimulation: {N: 1000, d: 0.8, n_diff: 10}\n")
    data = tmp_path / "grid.csv"
    assert main(["simulate", "--config", cfg, "--seed", "3", "--out", str(data)]) == 0
    out = tmp_path / "proj.csv"
    assert main(["mds", str(data), "--out", str(out)]) == 0
    fields = dict(kv.split("=") for kv in capsys.readouterr().err.split())
    assert float(fields["projected_delta"]) >= float(fields["original_delta"])
    assert read_csv(out)[0].keys() == {"x", "y", "truth"}


def test_console_script_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "clusterpower.cli", "separation", "-d", "2"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.strip() == "2.0000"

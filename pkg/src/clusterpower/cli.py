"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datagen, power, presets
from .config import ConfigError, RunConfig, load_config
from .reduce import mds, projected_separation

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_d_values(items: list[str]) -> list[float]:
    """Expand ``0.3x20`` style entries into repeated values."""
    values = []
    for item in items:
        for token in item.replace(",", " ").split():
            value, _, count = token.partition("x")
            try:
                v, c = float(value), int(count) if count else 1
            except ValueError:
                raise CLIError(f"cannot parse Cohen's d entry {token!r}", EXIT_USAGE)
            if v < 0:
                raise CLIError(f"Cohen's d must be non-negative, got {v:g}", EXIT_USAGE)
            if c < 1:
                raise CLIError(f"repeat count must be positive in {token!r}", EXIT_USAGE)
            values.extend([v] * c)
    return values


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as err:
        raise CLIError(f"cannot write {out}: {err.strerror}", EXIT_IO)


def _load(path) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        return load_config(path)
    except OSError as err:
        raise CLIError(f"cannot read config {path}: {err.strerror}", EXIT_IO)
    except ConfigError as err:
        raise CLIError(f"{path}: {err}", EXIT_USAGE)


def cmd_separation(args) -> int:
    items = list(args.d or [])
    if args.file:
        try:
            items.append(Path(args.file).read_text())
        except OSError as err:
            raise CLIError(f"cannot read {args.file}: {err.strerror}", EXIT_IO)
    values = parse_d_values(items)
    if not values:
        raise CLIError("give at least one Cohen's d value with -d or --file", EXIT_USAGE)
    print(f"{datagen.expected_separation(values):.4f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args.config)
    overrides = {}
    if args.k_config is not None:
        overrides.update(config=args.k_config, proportions=None)
    if args.delta is not None:
        overrides["delta"] = args.delta
    if args.n is not None:
        overrides["n"] = args.n
    cond = replace(cfg.conditions()[0], **overrides)
    seed = cfg.master_seed if args.seed is None else args.seed
    try:
        pop = cond.population(seed)
        ds = datagen.sample(pop, cond.n, np.random.default_rng(power.stable_hash(seed, cond.condition_id, "sample")))
    except (ValueError, KeyError) as err:
        raise CLIError(str(err), EXIT_USAGE)
    if args.out is None:
        raise CLIError("simulate needs --out", EXIT_USAGE)
    try:
        ds.to_csv(args.out)
    except OSError as err:
        raise CLIError(f"cannot write {args.out}: {err.strerror}", EXIT_IO)
    return EXIT_OK


def cmd_power(args) -> int:
    cfg = _load(args.config)
    seed = cfg.master_seed if args.seed is None else args.seed
    n_iter = cfg.n_iter if args.iterations is None else args.iterations
    fmt = args.format or cfg.output_format
    out = args.out or cfg.output_path
    reports = power.sweep(cfg.conditions(), n_iter, seed, args.threads)
    text = power.reports_to_json(reports) if fmt == "json" else power.reports_to_csv(reports)
    _write_text(text, out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    tol = args.tolerance
    if args.preset == "figure11":
        rows = presets.figure11(args.iterations, args.seed, args.threads)
        report = presets.comparison_csv(rows)
        summary = presets.figure11_diff(rows, tol)
    else:
        reports = presets.run_preset(args.preset, args.iterations, args.seed, args.threads)
        report = power.reports_to_csv(reports)
        summary = presets.diff_summary(presets.diff_against_reference(reports, args.preset, tol), tol)
    if args.out:
        prefix = Path(args.out)
        _write_text(report, str(prefix.with_name(prefix.name + "_report.csv")))
        _write_text(summary, str(prefix.with_name(prefix.name + "_diff.csv")))
        sys.stdout.write(summary.splitlines()[-1] + "\n")
    else:
        sys.stdout.write(report + "\n" + summary)
    return EXIT_OK


def read_numeric_csv(path: str) -> tuple[np.ndarray, np.ndarray | None]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise CLIError(f"cannot read {path}: {err.strerror}", EXIT_IO)
    if len(rows) < 2:
        raise CLIError(f"{path} has no data rows", EXIT_USAGE)
    header, body = rows[0], [r for r in rows[1:] if r]
    truth_col = header.index("truth") if "truth" in header else None
    data, truth = [], []
    for lineno, row in enumerate(body, start=2):
        try:
            values = [float(v) for j, v in enumerate(row) if j != truth_col]
            if truth_col is not None:
                truth.append(int(float(row[truth_col])))
        except (ValueError, IndexError):
            raise CLIError(f"{path} line {lineno}: non-numeric cell", EXIT_USAGE)
        data.append(values)
    if len({len(r) for r in data}) != 1:
        raise CLIError(f"{path}: rows have differing lengths", EXIT_USAGE)
    return np.asarray(data), (np.asarray(truth) if truth_col is not None else None)


def cmd_mds(args) -> int:
    data, truth = read_numeric_csv(args.input)
    try:
        proj = mds(data, 2, args.n_init, args.max_iter, args.tol, np.random.default_rng(args.seed), args.init)
    except ValueError as err:
        raise CLIError(str(err), EXIT_USAGE)
    out = args.out
    if out is None:
        raise CLIError("mds needs --out", EXIT_USAGE)
    try:
        proj.to_csv(out, truth)
    except OSError as err:
        raise CLIError(f"cannot write {out}: {err.strerror}", EXIT_IO)
    msg = f"stress={proj.stress:.6g} normalized_stress={proj.normalized_stress:.6g} iterations={proj.n_iterations_used}"
    if truth is not None and len(np.unique(truth)) > 1:
        msg += (
            f" original_delta={projected_separation(data, truth):.4f}"
            f" projected_delta={projected_separation(proj.coords, truth):.4f}"
        )
    print(msg, file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clusterpower", description="Power analysis for cluster analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separation", help="expected centroid separation from per-feature Cohen's d")
    p.add_argument("-d", action="append", metavar="D[xCOUNT]", help="Cohen's d, optionally repeated: 0.3x20")
    p.add_argument("--file", help="file of whitespace/comma separated d values")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("simulate", help="sample one dataset to CSV")
    p.add_argument("--config")
    p.add_argument("--k-config", dest="k_config", help="subgroup layout, e.g. two_50_50")
    p.add_argument("--delta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("power", help="Monte-Carlo power over a config grid")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="overrides simulation.master_seed")
    p.add_argument("--iterations", type=int, help="overrides simulation.n_iter")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("reproduce", help="rerun a published grid and diff against it")
    p.add_argument("preset", choices=presets.PRESETS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=presets.DEFAULT_TOLERANCE)
    p.add_argument("--out", help="output prefix; writes <prefix>_report.csv and <prefix>_diff.csv")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("mds", help="project a numeric CSV to two dimensions")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-init", dest="n_init", type=int, default=4)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--init", choices=("random", "classical"), default="random")
    p.set_defaults(func=cmd_mds)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CLIError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code


if __name__ == "__main__":
    sys.exit(main())

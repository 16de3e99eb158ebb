"""Rerun the reference power grids and diff them against the embedded values.

    python scripts/reproduce_tables.py --presets table1 table2 cmeans_text --out results/

Writes <preset>_report.csv and <preset>_diff.csv per preset. The full k-means
grid takes roughly 10-15 minutes on one core; --threads splits iterations
across processes without changing any number in the output.
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from clusterpower import power, presets


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--presets", nargs="+", default=["table1", "table2", "cmeans_text"],
                        choices=[p for p in presets.PRESETS if p != "figure11"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--tolerance", type=float, default=presets.DEFAULT_TOLERANCE)
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.presets:
        start = time.perf_counter()
        reports = presets.run_preset(name, args.iterations, args.seed, args.threads)
        (args.out / f"{name}_report.csv").write_text(power.reports_to_csv(reports))
        diff = presets.diff_summary(presets.diff_against_reference(reports, name, args.tolerance), args.tolerance)
        (args.out / f"{name}_diff.csv").write_text(diff)
        print(f"{name}: {diff.splitlines()[-1].lstrip('# ')} [{time.perf_counter() - start:.0f}s]")


if __name__ == "__main__":
    main()

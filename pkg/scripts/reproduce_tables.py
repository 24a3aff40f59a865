"""Benchmark tables: depth x size, cutoff trend, and the encoding comparison.

Each table is a CLI sweep over a shipped config; the report CSVs land in
``runs/<name>/report.csv`` and the median rows are printed.

    python3 scripts/reproduce_tables.py --jobs 4
    python3 scripts/reproduce_tables.py --only cutoff --seeds 0 1
"""

import argparse
from pathlib import Path

from ccvqaoa import cli, io

ROOT = Path(__file__).resolve().parent.parent
TABLES = {
    "depth": ("sweep", ROOT / "configs" / "depth_sweep.yaml"),
    "cutoff": ("sweep", ROOT / "configs" / "cutoff_sweep.yaml"),
    "compare": ("compare", ROOT / "configs" / "compare.yaml"),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", choices=sorted(TABLES), action="append")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "runs")
    ap.add_argument("--seed", type=int, help="single seed instead of the configured list")
    args = ap.parse_args(argv)
    for name in args.only or sorted(TABLES):
        command, cfg = TABLES[name]
        out = args.out / name
        argv_ = [command, "--config", str(cfg), "--jobs", str(args.jobs), "--out", str(out)]
        if args.seed is not None:
            argv_ += ["--seed", str(args.seed)]
        code = cli.main(argv_)
        if code:
            return code
        print(f"\n== {name} ==")
        for row in io.read_report(out / "report.csv"):
            if row["row"] == "median":
                print(
                    f"{row['encoding']:>12} n={row['n']} q={row['depth']} D={row['cutoff'] or '-':>3} "
                    f"best={float(row['best_cost']):9.4f} success={float(row['success_probability']):.3f} "
                    f"time={float(row['wall_time_s']):7.2f}s"
                )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

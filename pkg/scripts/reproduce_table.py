#!/usr/bin/env python3
"""Run the full society sweep and print the welfare/inequality table.

Full scale (population 300, 1000 steps, 3 repeats) takes tens of minutes on a
laptop; pass --desk for a two-minute small-scale version with the same
directional behavior.

    python scripts/reproduce_table.py --out results/ --seed 42 --threads 2 --desk
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from svoie.cli import main as cli_main
from svoie.io import read_comparison_csv


def print_table(rows):
    header = (
        f"{'society':>10} {'sample':>6} {'size':>4} "
        f"{'stable mean':>11} {'std':>6} {'cov':>6} "
        f"{'svoie mean':>10} {'std':>6} {'cov':>6} {'p':>9} {'d':>7}"
    )
    print(header)
    print("-" * len(header))
    last = None
    for r in rows:
        society = r.society if r.society != last else ""
        last = r.society
        print(
            f"{society:>10} {r.sample:>6} {r.size:>4} "
            f"{r.mean_stable:>11.3f} {r.std_stable:>6.3f} {r.cov_stable:>6.3f} "
            f"{r.mean_svoie:>10.3f} {r.std_svoie:>6.3f} {r.cov_svoie:>6.3f} "
            f"{r.p_value:>9.2e} {r.cohens_d:>7.3f}"
        )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--desk", action="store_true", help="small scale (pop 60, 200 steps)")
    parser.add_argument("--steps", type=int, help="override time steps per repeat")
    parser.add_argument("--repeats", type=int, help="override repeat count")
    args = parser.parse_args()

    cli_args = [
        "sweep",
        "--out", str(args.out),
        "--seed", str(args.seed),
        "--threads", str(args.threads),
    ]
    if args.desk:
        cli_args.append("--desk")
    if args.steps is not None:
        cli_args += ["--steps", str(args.steps)]
    if args.repeats is not None:
        cli_args += ["--repeats", str(args.repeats)]
    code = cli_main(cli_args)
    if code != 0:
        return code
    print()
    print_table(read_comparison_csv(args.out / "comparison.csv"))
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Regenerate every benchmark dataset in one go.

Thin wrapper over ``levisqueeze figure`` that loops the figure ids, so a
single command rebuilds all shipped datasets into one directory:

    python scripts/reproduce_figures.py --out datasets --seed 7
"""

import argparse
import sys
import time

from levisqueeze.cli import FIGURE_IDS, main as cli_main


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="datasets", help="target directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=0, help="seed stamped into metadata")
    parser.add_argument(
        "--only", nargs="*", choices=FIGURE_IDS, help="subset of figure ids to build"
    )
    args = parser.parse_args(argv)
    for fig_id in args.only or FIGURE_IDS:
        started = time.perf_counter()
        code = cli_main(
            [
                "figure",
                fig_id,
                "--out",
                args.out,
                "--format",
                args.format,
                "--seed",
                str(args.seed),
            ]
        )
        if code != 0:
            print(f"{fig_id} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"  {fig_id} finished in {time.perf_counter() - started:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())

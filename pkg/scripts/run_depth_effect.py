#!/usr/bin/env python3
"""Train on an order-3 synthetic treebank and decode the held-out split
under increasing context caps, printing the accuracy table.

Usage:
    python3 scripts/run_depth_effect.py [--train 2000] [--test 500] [--seed 0]
                                        [--csv results.csv]
"""

import argparse
import csv
import sys

from hpyparse.experiments import run_depth_effect


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train", type=int, default=2000)
    parser.add_argument("--test", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", default=None, help="optional CSV output path")
    args = parser.parse_args()

    result = run_depth_effect(args.train, args.test, args.seed)
    print(result.table())
    gap = result.accuracy["unbounded"] - result.accuracy["pcfg"]
    print(f"\nunbounded-vs-pcfg gap: {100 * gap:+.1f} accuracy points")

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["decoder", "exact_match", "train", "test", "seed"])
            for name, acc in result.accuracy.items():
                writer.writerow([name, f"{acc:.6f}", args.train, args.test, args.seed])
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

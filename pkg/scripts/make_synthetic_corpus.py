#!/usr/bin/env python3
"""Dump a synthetic order-3 tag corpus as word/TAG lines, split into
train and test files, for driving the CLI by hand.

Usage:
    python3 scripts/make_synthetic_corpus.py out_train.txt out_test.txt \
        [--train 2000] [--test 500] [--seed 0]
"""

import argparse
import sys

import numpy as np

from hpyparse.synthetic import generate_tag_corpus
from hpyparse.trees import write_tagged


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("train_path")
    parser.add_argument("test_path")
    parser.add_argument("--train", type=int, default=2000)
    parser.add_argument("--test", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    corpus = generate_tag_corpus(args.train + args.test, rng)
    for path, split in (
        (args.train_path, corpus[: args.train]),
        (args.test_path, corpus[args.train :]),
    ):
        with open(path, "w", encoding="utf-8") as fh:
            for words, tags in split:
                fh.write(write_tagged(words, tags) + "\n")
        print(f"wrote {len(split)} sentences to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

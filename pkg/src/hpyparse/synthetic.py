"""Synthetic corpora with controlled vertical-context depth.

The generator is a hidden binary process observed through words: each
position carries a hidden bit whose log-odds combine the previous three
bits with increasing weights, plus an observable class bit that copies
the hidden bit up to a fixed flip rate. The tag is the (class, hidden)
pair and the word spells the class, so decoding must infer the hidden
bits from noisy class evidence plus tag-chain structure.

Encoded as right-branching trees this is a depth-3 vertical grammar:
each additional level of ancestor context is strictly more informative,
a plain PCFG sees one step, and the four-tag alphabet keeps both the
backoff type counts graded and the deep context paths well populated
(lengths stay short so full-depth restaurants hold real counts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trees import Sentence


@dataclass
class TagChainSpec:
    history_weights: tuple[float, float, float] = (0.5, 1.2, 1.8)
    class_flip: float = 0.15
    min_len: int = 4
    max_len: int = 6


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def sample_tagged_sentence(
    rng: np.random.Generator, spec: TagChainSpec
) -> tuple[Sentence, list[str]]:
    n = int(rng.integers(spec.min_len, spec.max_len + 1))
    words: Sentence = []
    tags: list[str] = []
    bits: list[int] = []
    for i in range(n):
        logit = 0.0
        for back, weight in enumerate(spec.history_weights, start=1):
            if i - back >= 0:
                logit += weight * (1.0 if bits[i - back] else -1.0)
        bit = int(rng.random() < _sigmoid(logit))
        bits.append(bit)
        cls = bit if rng.random() >= spec.class_flip else 1 - bit
        tags.append(f"T{cls}{bit}")
        words.append("u" if cls == 0 else "v")
    return words, tags


def generate_tag_corpus(
    num_sentences: int, rng: np.random.Generator, spec: TagChainSpec | None = None
) -> list[tuple[Sentence, list[str]]]:
    spec = spec or TagChainSpec()
    return [sample_tagged_sentence(rng, spec) for _ in range(num_sentences)]

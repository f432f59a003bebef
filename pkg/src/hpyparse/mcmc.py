"""Metropolis-Hastings tree sampling and minimum-risk span decoding.

The chain proposes whole trees from the baseline grammar via inside
sampling and accepts with the standard independence-proposal ratio; on
rejection the previous sample is retained. Post-burn-in samples
accumulate per-(label, span) counts, and the decoder picks the tree in
the hypergraph whose total span count is maximal.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .hypergraph import Edge, Hypergraph, Node, subtree_from_edge
from .model import TrainedModel
from .pcfg import NEG_INF, InsideChart, inside, sample_tree, sentence_log_prob
from .trees import Sentence, Tree, annotate_spans


@dataclass
class SampleStats:
    """Span-label counts accumulated over the kept portion of a chain."""

    span_counts: Counter = field(default_factory=Counter)
    sample_count: int = 0
    acceptance_count: int = 0
    iterations: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.acceptance_count / self.iterations if self.iterations else 0.0

    def add_tree(self, tree: Tree, grammar) -> None:
        self.sample_count += 1
        for node in tree.internal_nodes():
            assert node.span is not None
            nt = grammar.nonterminals.id(node.label)
            self.span_counts[(nt, node.span[0], node.span[1])] += 1

    def merge(self, other: "SampleStats") -> None:
        """Pool counts from an independent chain."""
        self.span_counts.update(other.span_counts)
        self.sample_count += other.sample_count
        self.acceptance_count += other.acceptance_count
        self.iterations += other.iterations


def mh_sample(
    model: TrainedModel,
    words: Sentence,
    iters: int,
    burn_in: int,
    rng: np.random.Generator,
    chart: InsideChart | None = None,
) -> tuple[SampleStats, list[Tree], list[bool]]:
    """Run one chain; returns (stats, kept samples, acceptance trace).

    The proposal is the model's baseline grammar. The first state is a
    direct proposal draw; each iteration then draws a fresh tree and
    applies the acceptance test in log space. The trace has one entry
    per iteration; samples are the post-burn-in states in order (the
    same tree object repeats across rejected iterations).
    """
    if iters <= burn_in:
        raise DataError(f"iters ({iters}) must exceed burn_in ({burn_in})")
    pcfg = model.pcfg
    if chart is None:
        chart = inside(pcfg, words, "sum")
    if sentence_log_prob(pcfg, chart) == NEG_INF:
        raise DataError("sentence has no derivation; cannot start a chain")

    current, log_q_cur = sample_tree(pcfg, chart, words, rng)
    log_p_cur = model.tree_log_prob(current)
    stats = SampleStats(iterations=iters)
    samples: list[Tree] = []
    trace: list[bool] = []
    for t in range(iters):
        proposal, log_q_new = sample_tree(pcfg, chart, words, rng)
        log_p_new = model.tree_log_prob(proposal)
        log_ratio = (log_p_new - log_q_new) - (log_p_cur - log_q_cur)
        accept = log_ratio >= 0 or math.log(rng.random()) < log_ratio
        if accept:
            current, log_q_cur, log_p_cur = proposal, log_q_new, log_p_new
            stats.acceptance_count += 1
        trace.append(accept)
        if t >= burn_in:
            samples.append(current)
            stats.add_tree(current, model.grammar)
    return stats, samples, trace


def span_count_objective(stats: SampleStats, tree: Tree, grammar) -> int:
    """Total sampled-span count collected by a tree's internal nodes."""
    total = 0
    for node in tree.internal_nodes():
        assert node.span is not None
        nt = grammar.nonterminals.id(node.label)
        total += stats.span_counts.get((nt, node.span[0], node.span[1]), 0)
    return total


def mbr_decode(stats: SampleStats, hg: Hypergraph) -> Tree:
    """Tree in the hypergraph maximizing the summed span-label counts.

    Dynamic program over items by increasing span, applying unary edges
    child-before-parent within a span; ties break on (rule id, split).
    """
    if hg.empty:
        raise DataError("cannot decode over an empty hypergraph")
    grammar = hg.grammar
    unary_rank = {rid: k for k, rid in enumerate(grammar.unary_rule_order())}

    def node_order(node: Node) -> tuple[int, int, int]:
        nt, i, j = node
        best_unary = min(
            (unary_rank[e[0]] for e in hg.edges[node] if e[0] in unary_rank),
            default=-1,
        )
        # All-binary/lexical nodes first, then unary heads in rule order.
        return (j - i, best_unary, nt)

    value: dict[Node, int] = {}
    choice: dict[Node, Edge] = {}
    for node in sorted(hg.nodes, key=node_order):
        best: tuple[int, Edge] | None = None
        for edge in hg.edges[node]:
            tails = hg.edge_tails(node, edge)
            if any(t not in value for t in tails):
                continue  # unary head whose child is ordered later; other edges cover it
            total = sum(value[t] for t in tails)
            if best is None or total > best[0] or (total == best[0] and edge < best[1]):
                best = (total, edge)
        if best is None:
            raise DataError("hypergraph node has no scoreable edge")
        value[node] = stats.span_counts.get(node, 0) + best[0]
        choice[node] = best[1]

    def build(node: Node) -> Tree:
        edge = choice[node]
        tails = hg.edge_tails(node, edge)
        return subtree_from_edge(hg, node, edge, [build(t) for t in tails])

    assert hg.root is not None
    tree = build(hg.root)
    annotate_spans(tree)
    return tree


def most_frequent_tree(samples: list[Tree]) -> tuple[Tree, int]:
    """Diagnostic only: modal sampled tree (high variance in large spaces)."""
    from .trees import write_tree

    counts: Counter = Counter()
    first: dict[str, Tree] = {}
    for tree in samples:
        key = write_tree(tree)
        counts[key] += 1
        first.setdefault(key, tree)
    key, count = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return first[key], count

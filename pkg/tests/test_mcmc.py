import dataclasses
from collections import Counter

import numpy as np
import pytest

from hpyparse.errors import DataError
from hpyparse.hpyp import ContextTrie
from hpyparse.hypergraph import build_hypergraph
from hpyparse.mcmc import (
    SampleStats,
    mbr_decode,
    mh_sample,
    most_frequent_tree,
    span_count_objective,
)
from hpyparse.model import TrainConfig, train_model
from hpyparse.trees import read_treebank, write_tree

from .conftest import AMBIGUOUS_SENTENCE
from .oracles import enumerate_parses


def proposal_equals_model(toy_model):
    """A model whose context trie is empty scores trees exactly like its
    baseline grammar, making the chain's acceptance ratio identically one."""
    empty = ContextTrie(num_dishes=toy_model.grammar.num_rules)
    return dataclasses.replace(toy_model, trie=empty)


def test_acceptance_rate_is_one_when_p_equals_q(toy_model):
    model = proposal_equals_model(toy_model)
    rng = np.random.default_rng(5)
    stats, samples, trace = mh_sample(model, AMBIGUOUS_SENTENCE, 400, 50, rng)
    assert stats.acceptance_rate == 1.0
    assert all(trace)
    assert stats.iterations == 400
    assert stats.sample_count == len(samples) == 350


def test_degenerate_single_tree_language_never_rejects(toy_model):
    rng = np.random.default_rng(0)
    stats, samples, _ = mh_sample(toy_model, "the dog ran".split(), 100, 10, rng)
    assert stats.acceptance_rate == 1.0
    assert len({write_tree(t) for t in samples}) == 1


def test_chain_is_reproducible_given_seed(toy_model):
    runs = []
    for _ in range(2):
        rng = np.random.default_rng(1234)
        stats, samples, trace = mh_sample(toy_model, AMBIGUOUS_SENTENCE, 300, 30, rng)
        runs.append((stats.span_counts, [write_tree(t) for t in samples], trace))
    assert runs[0] == runs[1]


def test_iters_must_exceed_burn_in(toy_model):
    with pytest.raises(DataError):
        mh_sample(toy_model, AMBIGUOUS_SENTENCE, 10, 10, np.random.default_rng(0))


def test_underivable_sentence_rejected(toy_model):
    with pytest.raises(DataError):
        mh_sample(toy_model, ["with", "with"], 10, 1, np.random.default_rng(0))


def test_span_counts_bounded_by_samples(toy_model):
    rng = np.random.default_rng(2)
    stats, samples, _ = mh_sample(toy_model, AMBIGUOUS_SENTENCE, 200, 20, rng)
    assert 0.0 <= stats.acceptance_rate <= 1.0
    for count in stats.span_counts.values():
        assert count <= stats.sample_count


def test_chain_approaches_exact_posterior(toy_model):
    words = AMBIGUOUS_SENTENCE
    candidates = enumerate_parses(toy_model.grammar, words)
    logs = np.array([toy_model.tree_log_prob(t) for t in candidates])
    probs = np.exp(logs - logs.max())
    probs /= probs.sum()
    target = {write_tree(t): p for t, p in zip(candidates, probs)}

    def tv_after(iters):
        rng = np.random.default_rng(99)
        _, samples, _ = mh_sample(toy_model, words, iters, iters // 10, rng)
        counts = Counter(write_tree(t) for t in samples)
        return 0.5 * sum(
            abs(counts.get(k, 0) / len(samples) - p) for k, p in target.items()
        )

    short, long = tv_after(200), tv_after(5000)
    assert long <= 0.05
    assert long <= short + 0.01  # stationarity improves with chain length


def test_mbr_returns_unanimous_tree(toy_model):
    words = "the dog ran".split()
    hg = build_hypergraph(toy_model.grammar, words)
    rng = np.random.default_rng(0)
    stats, samples, _ = mh_sample(toy_model, words, 50, 5, rng)
    tree = mbr_decode(stats, hg)
    assert write_tree(tree) == write_tree(samples[-1])


def test_mbr_prefers_span_majorities(toy_model):
    # Hand-built counts: agree with tree A everywhere except one span
    # where tree B's sub-analysis dominates; the decoder must splice in
    # the dominant subtree (matching exhaustive maximization).
    words = AMBIGUOUS_SENTENCE
    grammar = toy_model.grammar
    hg = build_hypergraph(grammar, words)
    trees = enumerate_parses(grammar, words)
    assert len(trees) == 2
    by_kind = {}
    for t in trees:
        vp = t.children[1]
        by_kind["np" if len(vp.children) == 2 and vp.children[1].label == "NP" else "vp"] = t
    a, b = by_kind["np"], by_kind["vp"]

    stats = SampleStats(iterations=10, sample_count=10)
    for node in a.internal_nodes():
        key = (grammar.nonterminals.id(node.label), node.span[0], node.span[1])
        stats.span_counts[key] += 6
    for node in b.internal_nodes():
        key = (grammar.nonterminals.id(node.label), node.span[0], node.span[1])
        stats.span_counts[key] += 4
    decoded = mbr_decode(stats, hg)
    best = max(
        trees, key=lambda t: (span_count_objective(stats, t, grammar), write_tree(t))
    )
    assert span_count_objective(stats, decoded, grammar) == span_count_objective(
        stats, best, grammar
    )
    assert write_tree(decoded) == write_tree(a)


def test_mbr_dominates_every_sampled_tree(toy_model):
    words = AMBIGUOUS_SENTENCE
    hg = build_hypergraph(toy_model.grammar, words)
    rng = np.random.default_rng(3)
    stats, samples, _ = mh_sample(toy_model, words, 300, 30, rng)
    decoded = mbr_decode(stats, hg)
    objective = span_count_objective(stats, decoded, toy_model.grammar)
    for t in samples:
        assert objective >= span_count_objective(stats, t, toy_model.grammar)
    # and equals the exhaustive hypergraph maximum
    best = max(
        span_count_objective(stats, t, toy_model.grammar)
        for t in enumerate_parses(toy_model.grammar, words)
    )
    assert objective == best


def test_mbr_rejects_empty_hypergraph(toy_model):
    corpus, _ = read_treebank("(S (A a) (B b))")
    model, _ = train_model(corpus, TrainConfig(rare_threshold=0))
    hg = build_hypergraph(model.grammar, ["b", "a"])
    with pytest.raises(DataError):
        mbr_decode(SampleStats(), hg)


def test_stats_merge_pools_counts(toy_model):
    words = AMBIGUOUS_SENTENCE
    chains = []
    for seed in (1, 2):
        rng = np.random.default_rng(seed)
        stats, _, _ = mh_sample(toy_model, words, 100, 10, rng)
        chains.append(stats)
    merged = SampleStats()
    merged.merge(chains[0])
    merged.merge(chains[1])
    assert merged.sample_count == 180
    assert merged.iterations == 200
    total = chains[0].span_counts + chains[1].span_counts
    assert merged.span_counts == total


def test_most_frequent_tree_diagnostic(toy_model):
    rng = np.random.default_rng(4)
    _, samples, _ = mh_sample(toy_model, AMBIGUOUS_SENTENCE, 200, 20, rng)
    tree, count = most_frequent_tree(samples)
    exact = Counter(write_tree(t) for t in samples)
    assert count == max(exact.values())
    assert exact[write_tree(tree)] == count

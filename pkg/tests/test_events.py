from hypothesis import given

from hpyparse.events import (
    NONTERMINAL_CONTEXT,
    RULE_CONTEXT,
    extract_events,
    frontier_nonterminal,
    register_rules,
)
from hpyparse.grammar import Grammar
from hpyparse.trees import read_tree
from hpyparse.transforms import binarize_right

from .strategies import trees


def grammar_for(tree) -> Grammar:
    """Intern one tree without decoder-oriented validation (random trees
    may contain unary cycles, which event extraction does not care about)."""
    grammar = Grammar()
    for node in tree.internal_nodes():
        grammar.nonterminal(node.label)
    for word in tree.leaves():
        grammar.terminal(word)
    register_rules(grammar, tree)
    grammar.set_root(grammar.nonterminal(tree.label))
    return grammar


def test_depth_one_tree_single_event():
    tree = read_tree("(A a)")
    grammar = grammar_for(tree)
    events = extract_events(tree, grammar, NONTERMINAL_CONTEXT)
    assert len(events) == 1
    context, rule_id = events[0]
    assert context == (grammar.nonterminals.id("A"),)
    assert grammar.rule_text(rule_id) == "A -> a"


def test_context_chain_runs_root_to_node():
    # The emission event's context ends with the chain of its ancestors,
    # nearest last and the node's own label final.
    tree = read_tree("(S (VP (ADJP (NN fine))))")
    grammar = grammar_for(tree)
    events = extract_events(tree, grammar, NONTERMINAL_CONTEXT)
    names = lambda ctx: [grammar.nonterminals.text(e) for e in ctx]
    assert names(events[-1].context) == ["S", "VP", "ADJP", "NN"]
    assert grammar.rule_text(events[-1].rule) == "NN -> fine"


def test_preorder_event_output():
    tree = read_tree("(S (A x) (B y))")
    grammar = grammar_for(tree)
    events = extract_events(tree, grammar)
    heads = [grammar.rules[e.rule].lhs for e in events]
    assert [grammar.nonterminals.text(h) for h in heads] == ["S", "A", "B"]


def test_rule_mode_contexts_distinguish_child_slots():
    tree = read_tree("(S (A x) (A x))")
    grammar = grammar_for(tree)
    events = extract_events(tree, grammar, RULE_CONTEXT)
    assert events[0].context == ()
    left, right = events[1], events[2]
    assert left.rule == right.rule  # same production A -> x
    assert left.context != right.context  # but different slots
    for event in (left, right):
        assert frontier_nonterminal(grammar, event.context, RULE_CONTEXT) == grammar.rules[event.rule].lhs


@given(trees(max_depth=3, max_children=3))
def test_event_count_and_frontier_invariant(tree):
    tree = binarize_right(tree)
    grammar = grammar_for(tree)
    internal = list(tree.internal_nodes())
    for mode in (NONTERMINAL_CONTEXT, RULE_CONTEXT):
        events = extract_events(tree, grammar, mode)
        assert len(events) == len(internal)
        for event in events:
            lhs = grammar.rules[event.rule].lhs
            assert frontier_nonterminal(grammar, event.context, mode) == lhs


def test_register_rules_collects_each_production():
    tree = binarize_right(read_tree("(S (A x) (B y) (A x))"))
    grammar = grammar_for(tree)
    texts = {grammar.rule_text(r) for r in range(grammar.num_rules)}
    assert "S -> A S|" in texts
    assert "S| -> B A" in texts
    assert "A -> x" in texts

"""The pruned parse hypergraph for one sentence.

Nodes are (nonterminal, start, end) items; a hyperedge records the rule
and split that build its head from tail items or words. The chart keeps
exactly the items that are derivable bottom-up *and* reachable from the
root item, so every retained node takes part in at least one complete
tree. Top-down decoders walk edges from the root; the edge encoding
(rule id, split) determines child spans and kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import DataError
from .grammar import Grammar, Rule
from .pcfg import terminal_ids
from .trees import Sentence, Tree, annotate_spans

Node = tuple[int, int, int]  # (nonterminal id, start, end)
Edge = tuple[int, int]  # (rule id, split; -1 when the rule is not binary)


@dataclass
class Hypergraph:
    grammar: Grammar
    words: Sentence
    nodes: set[Node] = field(default_factory=set)
    edges: dict[Node, list[Edge]] = field(default_factory=dict)
    root: Node | None = None

    @property
    def empty(self) -> bool:
        return self.root is None

    @property
    def n(self) -> int:
        return len(self.words)

    def edge_tails(self, head: Node, edge: Edge) -> list[Node]:
        """Nonterminal child items of an edge, left to right."""
        rule = self.grammar.rules[edge[0]]
        _, i, j = head
        out: list[Node] = []
        for sym, (a, b) in zip(rule.rhs, _child_spans(rule, i, j, edge[1])):
            if not sym.terminal:
                out.append((sym.id, a, b))
        return out


def _child_spans(rule: Rule, i: int, j: int, split: int) -> list[tuple[int, int]]:
    if len(rule.rhs) == 1:
        return [(i, j)]
    return [(i, split), (split, j)]


def build_hypergraph(grammar: Grammar, words: Sentence) -> Hypergraph:
    """Derivable-and-reachable chart of items for ``words``.

    Returns an explicitly empty hypergraph (root None, no nodes) when the
    sentence has no complete derivation.
    """
    if grammar.root is None:
        raise DataError("grammar has no root symbol")
    n = len(words)
    if n == 0:
        raise DataError("cannot build a hypergraph for an empty sentence")
    word_ids = terminal_ids(grammar, words)
    derivable: set[Node] = set()
    edges: dict[Node, list[Edge]] = {}

    def child_ok(sym, a: int, b: int) -> bool:
        if sym.terminal:
            return b == a + 1 and word_ids[a] == sym.id
        return (sym.id, a, b) in derivable

    lexical = [rid for rid, r in enumerate(grammar.rules) if r.is_lexical]
    binary = [rid for rid, r in enumerate(grammar.rules) if r.is_binary]
    unary = grammar.unary_rule_order()

    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length
            found: dict[Node, list[Edge]] = {}

            def add(node: Node, edge: Edge) -> None:
                found.setdefault(node, []).append(edge)

            if length == 1:
                for rid in lexical:
                    rule = grammar.rules[rid]
                    if word_ids[i] == rule.rhs[0].id:
                        add((rule.lhs, i, j), (rid, -1))
            for rid in binary:
                rule = grammar.rules[rid]
                for m in range(i + 1, j):
                    if child_ok(rule.rhs[0], i, m) and child_ok(rule.rhs[1], m, j):
                        add((rule.lhs, i, j), (rid, m))
            derivable.update(found)
            for rid in unary:
                rule = grammar.rules[rid]
                child = (rule.rhs[0].id, i, j)
                if child in derivable:
                    node = (rule.lhs, i, j)
                    add(node, (rid, -1))
                    derivable.add(node)
            for node, node_edges in found.items():
                edges.setdefault(node, []).extend(node_edges)

    root = (grammar.root, 0, n)
    if root not in derivable:
        return Hypergraph(grammar, words)

    scratch = Hypergraph(grammar, words, derivable, edges)
    reachable: set[Node] = set()
    stack = [root]
    while stack:
        node = stack.pop()
        if node in reachable:
            continue
        reachable.add(node)
        for edge in edges.get(node, []):
            for tail in scratch.edge_tails(node, edge):
                if tail not in reachable:
                    stack.append(tail)

    kept_edges = {
        node: sorted(edges[node]) for node in reachable if node in edges
    }
    return Hypergraph(grammar, words, reachable, kept_edges, root)


def count_trees(hg: Hypergraph) -> int:
    """Number of complete trees the hypergraph encodes (exact big-int DP)."""
    if hg.empty:
        return 0
    memo: dict[Node, int] = {}

    def count(node: Node) -> int:
        got = memo.get(node)
        if got is not None:
            return got
        memo[node] = 0  # placeholder; acyclic by span/unary order
        total = 0
        for edge in hg.edges[node]:
            prod = 1
            for tail in hg.edge_tails(node, edge):
                prod *= count(tail)
            total += prod
        memo[node] = total
        return total

    assert hg.root is not None
    return count(hg.root)


def subtree_from_edge(hg: Hypergraph, node: Node, edge: Edge, children: list[Tree]) -> Tree:
    """Assemble the tree node for ``edge`` given built nonterminal subtrees."""
    rule = hg.grammar.rules[edge[0]]
    _, i, j = node
    out: list[Tree | str] = []
    child_iter = iter(children)
    for sym, (a, b) in zip(rule.rhs, _child_spans(rule, i, j, edge[1])):
        if sym.terminal:
            out.append(hg.words[a])
        else:
            out.append(next(child_iter))
    return Tree(hg.grammar.nonterminals.text(node[0]), out)


def enumerate_trees(hg: Hypergraph, limit: int | None = None) -> Iterator[Tree]:
    """All complete trees, depth-first over edges in deterministic order.

    Raises DataError if ``limit`` is given and exceeded; intended for
    desk-scale instances only.
    """
    if hg.empty:
        return
    produced = 0

    def expand(node: Node) -> Iterator[Tree]:
        for edge in hg.edges[node]:
            tails = hg.edge_tails(node, edge)
            if not tails:
                yield subtree_from_edge(hg, node, edge, [])
                continue
            for combo in _product_trees(tails):
                yield subtree_from_edge(hg, node, edge, combo)

    def _product_trees(tails: list[Node]) -> Iterator[list[Tree]]:
        if len(tails) == 1:
            for t in expand(tails[0]):
                yield [t]
            return
        for left in expand(tails[0]):
            for rest in _product_trees(tails[1:]):
                yield [left] + rest

    assert hg.root is not None
    for tree in expand(hg.root):
        produced += 1
        if limit is not None and produced > limit:
            raise DataError(f"more than {limit} trees in hypergraph")
        annotate_spans(tree)
        yield tree

"""Labeled ordered trees and treebank text I/O.

Trees carry string labels and string leaves so they can be printed and
compared without a grammar; interning happens when rules or events are
extracted. The bracketed format is one tree per line, ``(LABEL child ...)``
nesting, whitespace-separated tokens:

    tree    = "(" label child+ ")"
    child   = tree | word
    label   = any token without whitespace or parentheses
    word    = any token without whitespace or parentheses

Tag corpora are lines of whitespace-separated ``word/TAG`` tokens; the
tag is everything after the *last* slash, so words may contain slashes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DataError, TreebankError
from .grammar import Grammar

Sentence = list[str]


@dataclass
class Tree:
    """Internal node of a parse tree; leaves are plain strings."""

    label: str
    children: list["Tree | str"]
    span: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.children:
            raise DataError(f"node {self.label!r} has no children")

    def leaves(self) -> list[str]:
        out: list[str] = []
        stack: list[Tree | str] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, str):
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def internal_nodes(self) -> Iterator["Tree"]:
        """All internal nodes in preorder."""
        stack: list[Tree] = [self]
        while stack:
            node = stack.pop()
            yield node
            for child in reversed(node.children):
                if isinstance(child, Tree):
                    stack.append(child)

    def is_preterminal(self) -> bool:
        return all(isinstance(c, str) for c in self.children)

    def depth(self) -> int:
        """Number of internal-node levels (a preterminal-only tree has depth 1)."""
        return 1 + max(
            (c.depth() for c in self.children if isinstance(c, Tree)), default=0
        )


def annotate_spans(tree: Tree, start: int = 0) -> int:
    """Fill in (start, end) token spans; returns the end of ``tree``."""
    pos = start
    for child in tree.children:
        if isinstance(child, str):
            pos += 1
        else:
            pos = annotate_spans(child, pos)
    tree.span = (start, pos)
    return pos


def write_tree(tree: Tree) -> str:
    """Single-line bracketed form; inverse of read_tree up to whitespace."""
    parts: list[str] = []

    def emit(node: Tree | str) -> None:
        if isinstance(node, str):
            parts.append(node)
            return
        parts.append("(" + node.label)
        for child in node.children:
            emit(child)
        parts.append(")")

    emit(tree)
    out: list[str] = []
    for i, p in enumerate(parts):
        if i and p != ")" and not out[-1].endswith("("):
            out.append(" ")
        out.append(p)
    return "".join(out).replace("( ", "(")


def _tokenize_line(line: str) -> list[str]:
    return line.replace("(", " ( ").replace(")", " ) ").split()


def read_tree(line: str, lineno: int | None = None) -> Tree:
    """Parse one bracketed tree from a single line of text."""
    tokens = _tokenize_line(line)
    if not tokens:
        raise TreebankError("empty tree", lineno)
    pos = 0

    def parse() -> Tree | str:
        nonlocal pos
        if tokens[pos] != "(":
            word = tokens[pos]
            pos += 1
            return word
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise TreebankError("missing node label", lineno)
        label = tokens[pos]
        pos += 1
        children: list[Tree | str] = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse())
            if pos >= len(tokens):
                break
        if pos >= len(tokens):
            raise TreebankError("unbalanced brackets: missing ')'", lineno)
        pos += 1
        if not children:
            raise TreebankError(f"node {label!r} has no children", lineno)
        return Tree(label, children)

    root = parse()
    if isinstance(root, str):
        raise TreebankError("tree must start with '('", lineno)
    if pos != len(tokens):
        raise TreebankError("unbalanced brackets: trailing input", lineno)
    annotate_spans(root)
    return root


def read_treebank(
    text: str | Iterable[str], grammar: Grammar | None = None
) -> tuple[list[tuple[Sentence, Tree]], Grammar]:
    """Read one tree per nonblank line; intern symbols into ``grammar``.

    Returns (corpus, grammar) where corpus pairs each tree with its
    token yield. Only symbols are interned here; rules are collected
    after preprocessing (see ``model.build_grammar``).
    """
    if grammar is None:
        grammar = Grammar()
    lines = text.splitlines() if isinstance(text, str) else text
    corpus: list[tuple[Sentence, Tree]] = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        tree = read_tree(raw, lineno)
        words = tree.leaves()
        for node in tree.internal_nodes():
            grammar.nonterminal(node.label)
        for word in words:
            grammar.terminal(word)
        corpus.append((words, tree))
    return corpus, grammar


def replace_leaves(tree: Tree, words: Sentence) -> Tree:
    """Copy of ``tree`` with leaves replaced by ``words`` in yield order."""
    if len(tree.leaves()) != len(words):
        raise DataError("replacement words do not match the tree yield length")
    pos = 0

    def rec(node: Tree) -> Tree:
        nonlocal pos
        children: list[Tree | str] = []
        for child in node.children:
            if isinstance(child, str):
                children.append(words[pos])
                pos += 1
            else:
                children.append(rec(child))
        out = Tree(node.label, children)
        out.span = node.span
        return out

    return rec(tree)


def read_tag_corpus(text: str | Iterable[str]) -> list[tuple[Sentence, list[str]]]:
    """Read ``word/TAG`` lines into (words, tags) pairs."""
    lines = text.splitlines() if isinstance(text, str) else text
    corpus: list[tuple[Sentence, list[str]]] = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        words: Sentence = []
        tags: list[str] = []
        for token in raw.split():
            word, sep, tag = token.rpartition("/")
            if not sep or not word or not tag:
                raise DataError(f"line {lineno}: token {token!r} is not word/TAG")
            words.append(word)
            tags.append(tag)
        corpus.append((words, tags))
    return corpus


def write_tagged(words: Sentence, tags: list[str]) -> str:
    if len(words) != len(tags):
        raise DataError("words/tags length mismatch")
    return " ".join(f"{w}/{t}" for w, t in zip(words, tags))

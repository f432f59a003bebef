import pytest
from hypothesis import given

from hpyparse.errors import DataError, TreebankError
from hpyparse.trees import (
    Tree,
    read_tag_corpus,
    read_tree,
    read_treebank,
    replace_leaves,
    write_tagged,
    write_tree,
)

from .strategies import trees


def test_read_simple_tree():
    corpus, grammar = read_treebank("(S (NP (NN dog)) (VP (VB ran)))")
    words, tree = corpus[0]
    assert words == ["dog", "ran"]
    assert tree.label == "S"
    assert tree.span == (0, 2)
    assert tree.children[0].span == (0, 1)
    assert "NN" in grammar.nonterminals
    assert "dog" in grammar.terminals


def test_child_spans_partition_parent():
    corpus, _ = read_treebank("(S (A a b) (B (C c) d))")
    _, tree = corpus[0]
    for node in tree.internal_nodes():
        pos = node.span[0]
        for child in node.children:
            if isinstance(child, str):
                pos += 1
            else:
                assert child.span[0] == pos
                pos = child.span[1]
        assert pos == node.span[1]


def test_unbalanced_brackets_error_carries_line_number():
    with pytest.raises(TreebankError) as err:
        read_treebank("(S (A a))\n(S")
    assert err.value.line == 2
    with pytest.raises(TreebankError):
        read_tree("(S (A a)) extra")
    with pytest.raises(TreebankError):
        read_tree("(S (A a)))")


def test_empty_and_malformed_trees_rejected():
    for bad in ["()", "(S)", "( (A a))", "word"]:
        with pytest.raises(TreebankError):
            read_tree(bad)


def test_blank_lines_skipped():
    corpus, _ = read_treebank("\n(A a)\n\n(B b)\n")
    assert len(corpus) == 2


def test_write_root_only_lexical():
    assert write_tree(Tree("A", ["a"])) == "(A a)"


def test_write_is_independent_of_interning_order():
    one = read_tree("(S (B b) (A a))")
    # reading into a different grammar must not change the text
    assert write_tree(one) == "(S (B b) (A a))"


@given(trees())
def test_read_write_round_trip(tree):
    line = write_tree(tree)
    again = read_tree(line)
    assert again == tree
    assert write_tree(again) == line


def test_read_write_canonicalizes_whitespace():
    messy = "(S   (A  a)\t(B b))"
    assert write_tree(read_tree(messy)) == "(S (A a) (B b))"


def test_replace_leaves_in_order():
    tree = read_tree("(S (A x) (B y z))")
    swapped = replace_leaves(tree, ["1", "2", "3"])
    assert swapped.leaves() == ["1", "2", "3"]
    assert write_tree(tree) == "(S (A x) (B y z))"  # original untouched
    with pytest.raises(DataError):
        replace_leaves(tree, ["1"])


def test_tag_corpus_round_trip():
    text = "the/DT dog/NN ran/VB\na/DT cat/NN"
    corpus = read_tag_corpus(text)
    assert corpus[0] == (["the", "dog", "ran"], ["DT", "NN", "VB"])
    assert write_tagged(*corpus[1]) == "a/DT cat/NN"


def test_tag_corpus_keeps_slashed_words():
    corpus = read_tag_corpus("1/2/CD")
    assert corpus[0] == (["1/2"], ["CD"])


def test_tag_corpus_rejects_untagged_tokens():
    with pytest.raises(DataError):
        read_tag_corpus("word")
    with pytest.raises(DataError):
        read_tag_corpus("/DT")

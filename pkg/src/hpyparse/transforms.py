"""Tree transformations: right binarization and the tag-sequence encoding.

Reserved label markers (inputs may not already use them where noted):
  * ``|``   suffix on intermediate nodes introduced by right binarization
  * ``'``   suffix on twin tags introduced by the tag-sequence encoding
  * ``<S>`` the distinguished start tag rooting encoded tag sequences
"""

from __future__ import annotations

from .errors import DataError
from .trees import Sentence, Tree, annotate_spans

BAR_SUFFIX = "|"
TWIN_SUFFIX = "'"
START_TAG = "<S>"


def bar_label(label: str) -> str:
    return label + BAR_SUFFIX


def is_bar_label(label: str) -> bool:
    return label.endswith(BAR_SUFFIX)


def twin_label(tag: str) -> str:
    return tag + TWIN_SUFFIX


def is_twin_label(label: str) -> bool:
    return label.endswith(TWIN_SUFFIX)


def binarize_right(tree: Tree) -> Tree:
    """Split n-ary nodes down the right spine with ``label|`` intermediates.

    A node ``A -> c1 c2 ... cn`` (n > 2) becomes ``A -> c1 A|`` with
    ``A| -> c2 A|``, ..., ending in ``A| -> c(n-1) cn``. The intermediate
    carries no sibling history, so unbinarize_right inverts it exactly.
    """

    def rec(node: Tree | str) -> Tree | str:
        if isinstance(node, str):
            return node
        if is_bar_label(node.label):
            raise DataError(
                f"label {node.label!r} uses the reserved binarization marker"
            )
        children = [rec(c) for c in node.children]
        if len(children) <= 2:
            return Tree(node.label, children)
        tail = Tree(bar_label(node.label), children[-2:])
        for child in reversed(children[1:-2]):
            tail = Tree(bar_label(node.label), [child, tail])
        return Tree(node.label, [children[0], tail])

    out = rec(tree)
    assert isinstance(out, Tree)
    annotate_spans(out)
    return out


def unbinarize_right(tree: Tree) -> Tree:
    """Splice out ``label|`` intermediates; exact inverse of binarize_right."""

    def splice(node: Tree) -> list[Tree | str]:
        out: list[Tree | str] = []
        for child in node.children:
            if isinstance(child, Tree) and is_bar_label(child.label):
                out.extend(splice(child))
            elif isinstance(child, Tree):
                out.append(Tree(child.label, splice(child)))
            else:
                out.append(child)
        return out

    if is_bar_label(tree.label):
        raise DataError("cannot unbinarize a tree rooted at an intermediate node")
    out = Tree(tree.label, splice(tree))
    annotate_spans(out)
    return out


def pos_to_tree(tags: list[str], words: Sentence) -> Tree:
    """Encode a tag sequence as a right-branching tree rooted at <S>.

    Each non-final position k contributes a transition node labeled with
    the previous tag (or <S>) whose children are the twin preterminal
    emitting word k and the node for the rest of the sentence; the final
    transition has the twin child only, so the last emission terminates
    the branch.
    """
    if len(tags) != len(words):
        raise DataError(f"{len(tags)} tags for {len(words)} words")
    if not tags:
        raise DataError("empty tag sequence")
    for tag in tags:
        if is_twin_label(tag) or tag == START_TAG:
            raise DataError(f"tag {tag!r} collides with a reserved marker")
    tail: Tree | None = None
    for k in range(len(tags) - 1, -1, -1):
        emit = Tree(twin_label(tags[k]), [words[k]])
        label = tags[k - 1] if k >= 1 else START_TAG
        tail = Tree(label, [emit] if tail is None else [emit, tail])
    assert tail is not None
    annotate_spans(tail)
    return tail


def tree_to_pos(tree: Tree) -> tuple[list[str], Sentence]:
    """Recover (tags, words) from a tree over twin-emission rules.

    Works for any tree in which every word is emitted by a twin
    preterminal, which covers both canonical encodings and decoder
    output over an encoded-tag grammar.
    """
    tags: list[str] = []
    words: Sentence = []

    def walk(node: Tree) -> None:
        for child in node.children:
            if isinstance(child, str):
                if not is_twin_label(node.label) or len(node.children) != 1:
                    raise DataError(
                        f"word {child!r} is not emitted by a twin preterminal"
                    )
                tags.append(node.label[: -len(TWIN_SUFFIX)])
                words.append(child)
            else:
                walk(child)

    walk(tree)
    return tags, words

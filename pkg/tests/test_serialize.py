import numpy as np
import pytest

from hpyparse.errors import ModelFormatError
from hpyparse.model import TrainConfig, train_model
from hpyparse.serialize import MAGIC, load_model, save_model
from hpyparse.trees import read_treebank


def random_queries(model, rng, count=1000):
    grammar = model.grammar
    nts = len(grammar.nonterminals)
    out = []
    for _ in range(count):
        depth = int(rng.integers(0, 6))
        context = tuple(int(rng.integers(0, nts)) for _ in range(depth))
        out.append((context, int(rng.integers(0, grammar.num_rules))))
    return out


def test_round_trip_preserves_predictions(toy_model):
    blob = save_model(toy_model)
    again = load_model(blob)
    rng = np.random.default_rng(0)
    for context, rule in random_queries(toy_model, rng):
        assert again.predictive_prob(context, rule) == pytest.approx(
            toy_model.predictive_prob(context, rule), abs=0, rel=0
        )
    assert again.task == toy_model.task
    assert again.context_mode == toy_model.context_mode
    assert again.mapper.known == toy_model.mapper.known
    assert again.trie.num_events == toy_model.trie.num_events
    assert again.trie.max_depth == toy_model.trie.max_depth


def test_round_trip_is_byte_stable(toy_model):
    blob = save_model(toy_model)
    assert save_model(load_model(blob)) == blob
    assert save_model(toy_model) == blob


def test_minimal_model_round_trips():
    corpus, _ = read_treebank("(S a)")
    model, _ = train_model(corpus, TrainConfig(optimize=False))
    blob = save_model(model)
    again = load_model(blob)
    assert again.grammar.num_rules == 1
    assert again.predictive_prob((), 0) == pytest.approx(model.predictive_prob((), 0))


def test_corruption_detected(toy_model):
    blob = bytearray(save_model(toy_model))
    # flip one payload byte; must fail the checksum, never load silently
    blob[len(MAGIC) + 10 + 37] ^= 0xFF
    with pytest.raises(ModelFormatError, match="checksum"):
        load_model(bytes(blob))


def test_truncation_detected(toy_model):
    blob = save_model(toy_model)
    with pytest.raises(ModelFormatError):
        load_model(blob[: len(blob) // 2])
    with pytest.raises(ModelFormatError):
        load_model(blob[:4])


def test_bad_magic_and_version(toy_model):
    blob = save_model(toy_model)
    with pytest.raises(ModelFormatError, match="magic"):
        load_model(b"NOTAMODEL" + blob[9:])
    tampered = bytearray(blob)
    tampered[len(MAGIC)] = 0xEE  # version word
    with pytest.raises(ModelFormatError, match="version"):
        load_model(bytes(tampered))


def test_context_cap_round_trips(toy_model):
    import dataclasses

    capped = dataclasses.replace(toy_model, context_cap=2)
    again = load_model(save_model(capped))
    assert again.context_cap == 2

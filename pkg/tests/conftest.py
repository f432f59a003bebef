import pytest
from hypothesis import settings

from hpyparse.model import TrainConfig, train_model
from hpyparse.trees import read_treebank

# Property tests build real tries and charts; wall-clock deadlines only
# add flakiness under load.
settings.register_profile("hpyparse", deadline=None)
settings.load_profile("hpyparse")

# A small treebank with a real attachment ambiguity: "... saw the cat
# with the hat" admits both NP- and VP-attachment once the grammar is
# read off the corpus. NP attachment dominates the counts, so the MLE
# baseline and the context model agree on the argmax for that sentence
# (the divergent-preference case is exercised separately).
TOY_TREEBANK = """\
(S (NP (DT the) (NN dog)) (VP (VB saw) (NP (DT the) (NN cat))))
(S (NP (DT the) (NN cat)) (VP (VB saw) (NP (DT the) (NN dog))))
(S (NP (DT the) (NN dog)) (VP (VB saw) (NP (NP (DT the) (NN cat)) (PP (IN with) (NP (DT the) (NN hat))))))
(S (NP (DT a) (NN dog)) (VP (VB saw) (NP (NP (DT the) (NN hat)) (PP (IN with) (NP (DT a) (NN cat))))))
(S (NP (DT the) (NN hat)) (VP (VB saw) (NP (NP (DT a) (NN dog)) (PP (IN with) (NP (DT the) (NN cat))))))
(S (NP (DT the) (NN cat)) (VP (VP (VB saw) (NP (DT the) (NN dog))) (PP (IN with) (NP (DT the) (NN hat)))))
(S (NP (DT the) (NN hat)) (VP (VB fell)))
(S (NP (DT a) (NN dog)) (VP (VB ran)))
(S (NP (DT the) (NN dog)) (VP (VB ran)))
(S (NP (DT a) (NN cat)) (VP (VB fell)))
(S (NP (DT the) (NN cat)) (VP (VP (VB ran)) (PP (IN with) (NP (DT the) (NN dog)))))
(S (NP (DT a) (NN hat)) (VP (VB fell)))
"""

# Attachment preference flips between the baseline grammar and the
# context model when VP attachment dominates raw counts but the seen
# vertical contexts all favor NP attachment for this lexical pattern.
DIVERGENT_TREEBANK = """\
(S (NP (DT the) (NN dog)) (VP (VB saw) (NP (DT the) (NN cat))))
(S (NP (DT the) (NN cat)) (VP (VB saw) (NP (DT the) (NN dog))))
(S (NP (DT the) (NN dog)) (VP (VB saw) (NP (NP (DT the) (NN cat)) (PP (IN with) (NP (DT the) (NN hat))))))
(S (NP (DT the) (NN cat)) (VP (VP (VB saw) (NP (DT the) (NN dog))) (PP (IN with) (NP (DT the) (NN hat)))))
(S (NP (DT the) (NN hat)) (VP (VB fell)))
(S (NP (DT a) (NN dog)) (VP (VB ran)))
(S (NP (DT the) (NN dog)) (VP (VB ran)))
(S (NP (DT a) (NN cat)) (VP (VB fell)))
(S (NP (DT the) (NN cat)) (VP (VP (VB ran)) (PP (IN with) (NP (DT the) (NN dog)))))
(S (NP (DT a) (NN hat)) (VP (VB fell)))
"""

AMBIGUOUS_SENTENCE = "the dog saw the cat with the hat".split()


@pytest.fixture(scope="session")
def toy_corpus():
    corpus, _ = read_treebank(TOY_TREEBANK)
    return corpus


@pytest.fixture(scope="session")
def toy_model(toy_corpus):
    model, stats = train_model(toy_corpus, TrainConfig(rare_threshold=0))
    return model


@pytest.fixture(scope="session")
def toy_model_and_stats(toy_corpus):
    return train_model(toy_corpus, TrainConfig(rare_threshold=0))

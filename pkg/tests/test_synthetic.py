"""Synthetic fixture generator tests."""

from collections import Counter

from tokbench import corpus, synthetic
from tokbench.synthetic import SyntheticConfig


def test_corpus_is_deterministic_and_sized():
    config = SyntheticConfig(corpus_sentences=100, ner_sentences=50)
    assert synthetic.make_corpus(config) == synthetic.make_corpus(config)
    assert len(synthetic.make_corpus(config)) == 100


def test_corpus_lines_are_already_normalized():
    for line in synthetic.make_corpus(SyntheticConfig(corpus_sentences=50)):
        assert corpus.normalize(line) == line


def test_ner_set_covers_all_five_classes():
    sentences = synthetic.make_ner(SyntheticConfig(ner_sentences=200))
    begins = Counter(tag for s in sentences for tag in s.tags if tag.startswith("B-"))
    assert set(begins) == {f"B-{c}" for c in synthetic.ENTITY_CLASSES}


def test_ner_sentences_end_with_punctuation_token():
    for sentence in synthetic.make_ner(SyntheticConfig(ner_sentences=20)):
        assert sentence.words[-1] == "."
        assert sentence.tags[-1] == "O"


def test_corpus_and_ner_share_vocabulary():
    config = SyntheticConfig(corpus_sentences=400, ner_sentences=100)
    corpus_vocab = {w for line in synthetic.make_corpus(config) for w in line.split()}
    ner_vocab = {
        w for s in synthetic.make_ner(config) for w in s.words if w != "."
    }
    # word-level embeddings can only help if NER words occur in the corpus
    assert len(ner_vocab - corpus_vocab) / len(ner_vocab) < 0.12

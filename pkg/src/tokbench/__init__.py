"""tokbench: benchmark tokenization strategies for static embeddings on NER.

Pipeline: clean a corpus, train word/char/n-gram/BPE tokenizers, train
skip-gram embeddings, propagate BIO tags across tokenization boundaries,
fit a SAGA softmax tagger, and report accuracy / macro F1 / per-class
precision-recall per strategy.
"""

__version__ = "0.1.0"

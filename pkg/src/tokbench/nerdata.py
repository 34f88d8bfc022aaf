"""BIO-tagged NER data: CoNLL parsing, seeded splits, and tag propagation.

Tag propagation copies a word's entity label onto its sub-tokens: B-X goes
to the first sub-token, the rest become I-X; O and I-X words replicate their
tag. This preserves per-type entity-start counts under every tokenization
strategy, so macro-F1 comparisons stay aligned.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from . import corpus, tokenizers
from .errors import ConfigurationError, FormatError

_TAG_RE = re.compile(r"^(O|[BI]-.+)$")


@dataclass
class TaggedSentence:
    words: list[str]
    tags: list[str]

    def __post_init__(self):
        if not self.words or len(self.words) != len(self.tags):
            raise FormatError(
                f"need equal nonzero word/tag counts, got {len(self.words)}/{len(self.tags)}"
            )
        for tag in self.tags:
            if not _TAG_RE.match(tag):
                raise FormatError(f"bad BIO tag {tag!r}")


@dataclass
class PropagatedSentence:
    subtokens: list[str]
    tags: list[str]
    origin_word: list[int]


@dataclass
class SplitConfig:
    train_fraction: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigurationError(f"train_fraction must be in (0,1), got {self.train_fraction}")


def parse_conll(source) -> list[TaggedSentence]:
    """Parse two-column BIO data (token, tag; blank line ends a sentence)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    sentences: list[TaggedSentence] = []
    words: list[str] = []
    tags: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if words:
                sentences.append(TaggedSentence(words=words, tags=tags))
                words, tags = [], []
            continue
        fields = line.split()
        if len(fields) != 2:
            raise FormatError(f"line {lineno}: expected 'token tag', got {len(fields)} fields")
        words.append(fields[0])
        tags.append(fields[1])
    if words:
        sentences.append(TaggedSentence(words=words, tags=tags))
    return sentences


def save_conll(sentences: Iterable, sink) -> None:
    """Write sentences (TaggedSentence or PropagatedSentence) as two-column BIO."""
    blocks = []
    for sentence in sentences:
        tokens = getattr(sentence, "subtokens", None)
        if tokens is None:
            tokens = sentence.words
        blocks.append("\n".join(f"{tok}\t{tag}" for tok, tag in zip(tokens, sentence.tags)))
    payload = "\n\n".join(blocks) + "\n"
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def lint_bio(sentence: TaggedSentence) -> list[str]:
    """Warnings for I-X tags that do not continue a same-type entity.

    Real datasets contain such sequences; they are reported, never rejected.
    """
    warnings = []
    previous = "O"
    for pos, tag in enumerate(sentence.tags):
        if tag.startswith("I-"):
            entity = tag[2:]
            if previous == "O" or previous[2:] != entity:
                warnings.append(f"token {pos}: {tag} does not continue a {entity} entity")
        previous = tag
    return warnings


def split(sentences: list[TaggedSentence], config: SplitConfig):
    """Seeded shuffle, then prefix split at round(train_fraction * N)."""
    if len(sentences) < 2:
        raise ConfigurationError(f"need at least 2 sentences to split, got {len(sentences)}")
    shuffled = list(sentences)
    random.Random(config.seed).shuffle(shuffled)
    cut = round(config.train_fraction * len(shuffled))
    return shuffled[:cut], shuffled[cut:]


def propagate_tags(
    sentence: TaggedSentence, spec: tokenizers.TokenizerSpec, language: str = "other"
) -> PropagatedSentence:
    """Expand word-level BIO tags onto each strategy's sub-token boundaries.

    Every word is normalized before tokenization; a word that normalizes to
    empty (pure punctuation) keeps its original form so the alignment never
    drops tokens.
    """
    subtokens: list[str] = []
    tags: list[str] = []
    origin: list[int] = []
    for w_idx, (word, tag) in enumerate(zip(sentence.words, sentence.tags)):
        normalized = corpus.normalize(word, language) or word
        pieces = tokenizers.tokenize(normalized, spec).tokens
        for p_idx, piece in enumerate(pieces):
            subtokens.append(piece)
            origin.append(w_idx)
            if tag.startswith("B-") and p_idx > 0:
                tags.append("I-" + tag[2:])
            else:
                tags.append(tag)
    return PropagatedSentence(subtokens=subtokens, tags=tags, origin_word=origin)


def label_histogram(sentences: Iterable) -> Counter:
    """Exact tag counts over all tokens (TaggedSentence or PropagatedSentence)."""
    histogram: Counter[str] = Counter()
    for sentence in sentences:
        histogram.update(sentence.tags)
    return histogram

"""Synthetic agglutinative fixture: template grammar of stems x suffix chains.

Generates a small normalized corpus and a matching 5-class BIO NER set from
one seeded grammar. Filler nouns and verbs inflect with chained suffixes
(so sub-word strategies have structure to find), while entity surface forms
stay uninflected and co-occur with class-specific context words (so word
identity is highly informative for the tagger).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .nerdata import TaggedSentence

ENTITY_CLASSES = ("PER", "LOC", "ORG", "DATE", "MISC")

_PER_FIRST = ["veli", "ayse", "kerem", "zehra", "tarik"]
_PER_LAST = ["demirci", "kaya", "ozturk", "sahin"]
_LOC = ["istanbul", "ankara", "izmir", "bursa", "konya", "mugla", "rize", "adana"]
_ORG_HEAD = ["tekno", "deniz", "orman", "enerji", "bilim"]
_ORG_TAIL = ["kurumu", "vakfi", "bankasi"]
_DATE = ["pazartesi", "sali", "carsamba", "persembe", "cuma", "ocak", "subat", "nisan"]
_MISC = ["futbol", "satranc", "opera", "sinema", "tiyatro", "muzik"]

# Context words adjacent to entities of one class; all tagged O.
_CLASS_MARKERS = {
    "PER": ["sayin", "bay", "doktor"],
    "LOC": ["sehri", "bolgesi", "yakininda"],
    "ORG": ["genel", "resmi", "yeni"],
    "DATE": ["gunu", "ayinda", "tarihinde"],
    "MISC": ["hakkinda", "uzerine", "konusu"],
}

_NOUN_STEMS = [
    "ev", "kitap", "okul", "masa", "pencere", "bahce", "yol", "agac", "deniz",
    "dag", "kalem", "defter", "araba", "kapi", "duvar", "sokak", "oda", "resim",
]
_NOUN_SUFFIX_CHAINS = ["", "ler", "im", "de", "lerim", "imde", "lerimde", "den", "lerden"]
_VERB_STEMS = [
    "gel", "git", "oku", "yaz", "bak", "dur", "kos", "uyu", "calis", "anlat",
]
_VERB_SUFFIX_CHAINS = ["di", "iyor", "ecek", "mis", "diler", "iyordu", "ecekler", "misti"]


@dataclass
class SyntheticConfig:
    corpus_sentences: int = 1000
    ner_sentences: int = 450
    corpus_seed: int = 101
    ner_seed: int = 202


def _noun(rng: random.Random) -> str:
    return rng.choice(_NOUN_STEMS) + rng.choice(_NOUN_SUFFIX_CHAINS)


def _verb(rng: random.Random) -> str:
    return rng.choice(_VERB_STEMS) + rng.choice(_VERB_SUFFIX_CHAINS)


def _entity(rng: random.Random, entity_class: str) -> list[str]:
    if entity_class == "PER":
        words = [rng.choice(_PER_FIRST)]
        if rng.random() < 0.5:
            words.append(rng.choice(_PER_LAST))
        return words
    if entity_class == "LOC":
        return [rng.choice(_LOC)]
    if entity_class == "ORG":
        return [rng.choice(_ORG_HEAD), rng.choice(_ORG_TAIL)]
    if entity_class == "DATE":
        return [rng.choice(_DATE)]
    return [rng.choice(_MISC)]


def _sentence(rng: random.Random) -> tuple[list[str], list[str]]:
    """One (words, tags) pair; roughly one sentence in six carries no entity."""
    words: list[str] = []
    tags: list[str] = []

    def add(word: str, tag: str = "O"):
        words.append(word)
        tags.append(tag)

    roll = rng.random()
    if roll < 1 / 6:
        for _ in range(rng.randint(2, 4)):
            add(_noun(rng))
        add(_verb(rng))
    else:
        entity_class = rng.choice(ENTITY_CLASSES)
        marker = rng.choice(_CLASS_MARKERS[entity_class])
        entity = _entity(rng, entity_class)
        entity_tags = [f"B-{entity_class}"] + [f"I-{entity_class}"] * (len(entity) - 1)
        if rng.random() < 0.5:
            add(marker)
            for w, t in zip(entity, entity_tags):
                add(w, t)
            add(_noun(rng))
        else:
            add(_noun(rng))
            for w, t in zip(entity, entity_tags):
                add(w, t)
            add(marker)
        add(_verb(rng))
    return words, tags


def make_corpus(config: SyntheticConfig) -> list[str]:
    """Normalized corpus lines (lowercase letters and single spaces only)."""
    rng = random.Random(config.corpus_seed)
    return [" ".join(_sentence(rng)[0]) for _ in range(config.corpus_sentences)]


def make_ner(config: SyntheticConfig) -> list[TaggedSentence]:
    """BIO sentences over the same grammar, with a trailing '.' token."""
    rng = random.Random(config.ner_seed)
    sentences = []
    for _ in range(config.ner_sentences):
        words, tags = _sentence(rng)
        words.append(".")
        tags.append("O")
        sentences.append(TaggedSentence(words=words, tags=tags))
    return sentences

"""Tokenization strategies: word, char, character n-gram, and BPE.

Sliding windows never cross whitespace, and whitespace itself is never a
token; per-word spans are kept so entity tags can be propagated onto
sub-tokens later.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bpe
from .errors import ConfigurationError

STRATEGY_KINDS = ("word", "char", "ngram", "bpe")

#: The nine-strategy matrix of the full benchmark.
DEFAULT_STRATEGIES = (
    "word",
    "char",
    "bigram",
    "trigram",
    "bpe-5000",
    "bpe-10000",
    "bpe-25000",
    "bpe-50000",
    "bpe-100000",
)


@dataclass
class TokenizerSpec:
    kind: str
    n: int | None = None
    model: bpe.BpeModel | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigurationError(f"unknown tokenizer kind {self.kind!r}")
        if (self.kind == "ngram") != (self.n is not None):
            raise ConfigurationError("window length n is required iff kind='ngram'")
        if self.n is not None and self.n < 2:
            raise ConfigurationError(f"ngram window must be >= 2, got {self.n}")
        if (self.kind == "bpe") != (self.model is not None):
            raise ConfigurationError("a BPE model is required iff kind='bpe'")


@dataclass
class TokenStream:
    tokens: list[str]
    word_spans: list[tuple[int, int]]


@dataclass
class TokenStats:
    token_count: int
    type_count: int
    mean_tokens_per_word: float


def bpe_target(strategy: str) -> int | None:
    """Vocabulary target for a 'bpe-<N>' or 'bpe-<N>k' strategy id, else None."""
    if not strategy.startswith("bpe-"):
        return None
    tail = strategy[4:].lower()
    scale = 1
    if tail.endswith("k"):
        tail, scale = tail[:-1], 1000
    try:
        target = int(tail) * scale
    except ValueError:
        raise ConfigurationError(f"bad BPE strategy id {strategy!r}") from None
    if target < 1:
        raise ConfigurationError(f"bad BPE vocabulary target in {strategy!r}")
    return target


def spec_for_strategy(strategy: str, model: bpe.BpeModel | None = None) -> TokenizerSpec:
    """Map a strategy id (word|char|bigram|trigram|bpe-<N>) to a TokenizerSpec."""
    if strategy == "word":
        return TokenizerSpec(kind="word")
    if strategy == "char":
        return TokenizerSpec(kind="char")
    if strategy == "bigram":
        return TokenizerSpec(kind="ngram", n=2)
    if strategy == "trigram":
        return TokenizerSpec(kind="ngram", n=3)
    if bpe_target(strategy) is not None:
        if model is None:
            raise ConfigurationError(f"strategy {strategy!r} needs a trained BPE model")
        return TokenizerSpec(kind="bpe", model=model)
    raise ConfigurationError(f"unknown strategy {strategy!r}")


def tokenize(text: str, spec: TokenizerSpec) -> TokenStream:
    """Tokenize normalized text; records the token span of every source word.

    word: whitespace split. char: one token per character. ngram: stride-1
    windows of length n inside each word (a shorter word yields itself).
    bpe: per-word greedy encoding with the spec's model.
    """
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    for word in text.split():
        start = len(tokens)
        if spec.kind == "word":
            tokens.append(word)
        elif spec.kind == "char":
            tokens.extend(word)
        elif spec.kind == "ngram":
            n = spec.n
            if len(word) < n:
                tokens.append(word)
            else:
                tokens.extend(word[i : i + n] for i in range(len(word) - n + 1))
        else:
            tokens.extend(bpe.encode(word, spec.model))
        spans.append((start, len(tokens)))
    return TokenStream(tokens=tokens, word_spans=spans)


def token_statistics(stream: TokenStream) -> TokenStats:
    token_count = len(stream.tokens)
    word_count = len(stream.word_spans)
    return TokenStats(
        token_count=token_count,
        type_count=len(set(stream.tokens)),
        mean_tokens_per_word=(token_count / word_count) if word_count else 0.0,
    )


def save_token_streams(streams, tokens_path, spans_path=None) -> None:
    """One document per line, tokens space-separated; optional spans sidecar.

    The sidecar holds one line per document of flattened start/end index
    pairs, e.g. "0 1 1 3" for spans [0,1) and [1,3).
    """
    with open(tokens_path, "w", encoding="utf-8", newline="\n") as sink:
        for stream in streams:
            sink.write(" ".join(stream.tokens))
            sink.write("\n")
    if spans_path is not None:
        with open(spans_path, "w", encoding="utf-8", newline="\n") as sink:
            for stream in streams:
                flat = " ".join(f"{s} {e}" for s, e in stream.word_spans)
                sink.write(flat)
                sink.write("\n")


def load_token_lines(tokens_path) -> list[list[str]]:
    with open(tokens_path, encoding="utf-8") as source:
        return [line.split() for line in source]

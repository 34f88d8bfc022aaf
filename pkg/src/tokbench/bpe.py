"""Byte Pair Encoding: greedy most-frequent-pair training and rank-order encoding.

Training repeatedly merges the adjacent symbol pair with the highest total
frequency (weighted by word counts) until the vocabulary reaches its target
size, or stops early once the best pair occurs fewer than twice. Ties break
on (1) frequency, (2) shortest merged token, (3) lexicographically smallest
merged token, then (4) lexicographic (left, right) -- the last level only
matters when two different pairs concatenate to the same string.

Merges never cross word boundaries. Pair counts are updated incrementally
(only words containing a merge site are recounted); tests pin equivalence to
a recount-from-scratch reference.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigurationError, FormatError

DEFAULT_MARKER = "▁"  # begin-of-word marker, prepended as its own symbol

WordFrequencyTable = Counter  # word -> occurrence count


@dataclass
class BpeModel:
    alphabet: list[str]
    merges: list[tuple[str, str]]
    vocab: dict[str, int]
    target_vocab: int
    marker: str | None = None

    def __post_init__(self):
        self._ranks = {pair: rank for rank, pair in enumerate(self.merges)}
        self._encode_cache: dict[str, tuple[str, ...]] = {}

    @property
    def achieved_vocab(self) -> int:
        return len(self.vocab)

    @property
    def early_stopped(self) -> bool:
        return len(self.vocab) < self.target_vocab


def count_words(corpus: Iterable, marker: str | None = None) -> WordFrequencyTable:
    """Whitespace-token counts over documents (CleanDocument or str), marker applied."""
    table: Counter[str] = Counter()
    for doc in corpus:
        text = getattr(doc, "text", doc)
        table.update(text.split())
    if marker:
        table = Counter({marker + word: count for word, count in table.items()})
    return table


def _split_symbols(word: str, marker: str | None) -> list[str]:
    if marker and word.startswith(marker):
        return [marker, *word[len(marker):]]
    return list(word)


def _merge_word(symbols: list[str], left: str, right: str, merged: str) -> list[str]:
    """Replace all non-overlapping (left, right) occurrences, left to right."""
    out: list[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def _pair_key(pair: tuple[str, str], count: int) -> tuple:
    merged = pair[0] + pair[1]
    return (-count, len(merged), merged, pair)


def train(freqs: WordFrequencyTable, target_vocab: int, marker: str | None = None) -> BpeModel:
    """Train a BPE model on a word frequency table (keys already marker-prefixed)."""
    words = [_split_symbols(word, marker) for word in freqs]
    counts = list(freqs.values())
    alphabet = sorted({sym for word in words for sym in word})
    if marker and marker not in alphabet:
        alphabet = sorted(alphabet + [marker])
    if target_vocab < len(alphabet):
        raise ConfigurationError(
            f"target_vocab {target_vocab} is below the base alphabet size {len(alphabet)}"
        )

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}
    for idx, symbols in enumerate(words):
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += counts[idx]
            pair_words.setdefault(pair, set()).add(idx)

    heap = [_pair_key(pair, count) for pair, count in pair_counts.items()]
    heapq.heapify(heap)
    vocab_tokens = set(alphabet)
    merges: list[tuple[str, str]] = []

    while len(alphabet) + len(merges) < target_vocab and heap:
        neg_count, _, merged, pair = heapq.heappop(heap)
        if pair_counts.get(pair) != -neg_count:
            continue  # stale entry
        if merged in vocab_tokens:
            continue  # would duplicate an existing token
        if -neg_count < 2:
            break  # merging singletons cannot improve encoding
        merges.append(pair)
        vocab_tokens.add(merged)
        left, right = pair
        for idx in list(pair_words.get(pair, ())):
            symbols = words[idx]
            old_pairs = Counter(zip(symbols, symbols[1:]))
            new_symbols = _merge_word(symbols, left, right, merged)
            new_pairs = Counter(zip(new_symbols, new_symbols[1:]))
            words[idx] = new_symbols
            for changed in old_pairs.keys() | new_pairs.keys():
                delta = new_pairs[changed] - old_pairs[changed]
                if delta == 0:
                    continue
                pair_counts[changed] += delta * counts[idx]
                if pair_counts[changed] <= 0:
                    del pair_counts[changed]
                else:
                    heapq.heappush(heap, _pair_key(changed, pair_counts[changed]))
                occupied = pair_words.setdefault(changed, set())
                if new_pairs[changed] > 0:
                    occupied.add(idx)
                else:
                    occupied.discard(idx)
        pair_words.pop(pair, None)

    vocab = {sym: i for i, sym in enumerate(alphabet)}
    for left, right in merges:
        vocab[left + right] = len(vocab)
    return BpeModel(
        alphabet=alphabet,
        merges=merges,
        vocab=vocab,
        target_vocab=target_vocab,
        marker=marker,
    )


def encode(word: str, model: BpeModel) -> list[str]:
    """Greedy rank-order encoding: lowest-rank applicable merge first.

    Unknown characters stay as singleton tokens. Concatenating the output
    (marker removed) reproduces the word.
    """
    cached = model._encode_cache.get(word)
    if cached is not None:
        return list(cached)
    symbols = _split_symbols((model.marker or "") + word, model.marker)
    if not symbols:
        raise ConfigurationError("cannot encode an empty word")
    ranks = model._ranks
    while len(symbols) > 1:
        best_rank, best_pair = None, None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        symbols = _merge_word(symbols, best_pair[0], best_pair[1], best_pair[0] + best_pair[1])
    model._encode_cache[word] = tuple(symbols)
    return symbols


# ---------------------------------------------------------------------------
# Model file format (UTF-8 text):
#   line 1: "bpe-model v1 <achieved_vocab> <marker|none>"
#   line 2: space-separated alphabet symbols
#   then one merge per line: "<left> <right>" in rank order
# ---------------------------------------------------------------------------


def save(model: BpeModel, sink) -> None:
    if model.marker == "none" or (model.marker and " " in model.marker):
        raise FormatError(f"marker {model.marker!r} cannot be serialized")
    lines = [
        f"bpe-model v1 {model.achieved_vocab} {model.marker or 'none'}",
        " ".join(model.alphabet),
    ]
    lines.extend(f"{left} {right}" for left, right in model.merges)
    payload = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def load(source) -> BpeModel:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty BPE model file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "bpe-model":
        raise FormatError(f"line 1: not a BPE model header: {lines[0]!r}")
    if header[1] != "v1":
        raise FormatError(f"line 1: unsupported BPE model version {header[1]!r}")
    try:
        achieved = int(header[2])
    except ValueError:
        raise FormatError(f"line 1: bad vocab count {header[2]!r}") from None
    marker = None if header[3] == "none" else header[3]
    if len(lines) < 2:
        raise FormatError("truncated BPE model file: missing alphabet line")
    alphabet = lines[1].split()

    known = set(alphabet)
    merges: list[tuple[str, str]] = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected '<left> <right>', got {line!r}")
        left, right = parts
        if left not in known or right not in known:
            raise FormatError(f"line {lineno}: merge references unknown token")
        merges.append((left, right))
        known.add(left + right)
    if len(alphabet) + len(merges) != achieved:
        raise FormatError(
            f"truncated BPE model file: header declares {achieved} tokens, "
            f"found {len(alphabet) + len(merges)}"
        )
    vocab = {sym: i for i, sym in enumerate(alphabet)}
    for left, right in merges:
        vocab[left + right] = len(vocab)
    return BpeModel(
        alphabet=alphabet, merges=merges, vocab=vocab, target_vocab=achieved, marker=marker
    )

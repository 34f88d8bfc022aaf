"""Static word embeddings: skip-gram with negative sampling (SGNS).

Single-threaded training is bit-reproducible for a fixed seed: vector
initialization, subsampling, window draws, and negative draws all come from
one seeded generator consumed in a fixed order. The learning rate decays
linearly per in-vocab token occurrence over epochs * corpus occurrences
(subsample-dropped occurrences still advance the schedule).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, FormatError

_LOG_EPS = 1e-10  # sigmoid clamp before log


@dataclass
class EmbedConfig:
    dim: int = 150
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    subsample_t: float = 1e-3
    seed: int = 0
    table_size: int = 1_000_000

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ConfigurationError(f"window must be >= 1, got {self.window}")
        if self.negatives < 0:
            raise ConfigurationError(f"negatives must be >= 0, got {self.negatives}")
        if not (self.lr_start > self.lr_end > 0):
            raise ConfigurationError(
                f"need lr_start > lr_end > 0, got {self.lr_start} / {self.lr_end}"
            )
        if self.table_size < 1:
            raise ConfigurationError(f"table_size must be >= 1, got {self.table_size}")


@dataclass(eq=False)
class Vocabulary:
    tokens: list[str]                 # index -> token, by descending frequency
    index: dict[str, int]             # token -> index
    counts: np.ndarray                # index -> corpus frequency
    sampling_table: np.ndarray        # negative-sampling table (freq^0.75)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


@dataclass(eq=False)
class EmbeddingTable:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]


def _stream_tokens(stream) -> Sequence[str]:
    return getattr(stream, "tokens", stream)


def build_vocab(streams: Iterable, min_count: int, table_size: int = 1_000_000) -> Vocabulary:
    """Count tokens, keep frequency >= min_count, build the unigram^0.75 table.

    Indices are dense, ordered by descending frequency with lexicographic
    tie-break. Table slots are allocated by cumulative rounding of the
    freq^0.75 distribution.
    """
    counts: dict[str, int] = {}
    for stream in streams:
        for token in _stream_tokens(stream):
            counts[token] = counts.get(token, 0) + 1
    kept = sorted(
        ((token, n) for token, n in counts.items() if n >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    if not kept:
        raise ConfigurationError(f"no token reaches min_count={min_count}; vocabulary is empty")
    tokens = [token for token, _ in kept]
    freq = np.array([n for _, n in kept], dtype=np.int64)
    weights = freq.astype(np.float64) ** 0.75
    bounds = np.rint(np.cumsum(weights) / weights.sum() * table_size).astype(np.int64)
    slots = np.diff(bounds, prepend=0)
    table = np.repeat(np.arange(len(tokens), dtype=np.int64), slots)
    return Vocabulary(
        tokens=tokens,
        index={token: i for i, token in enumerate(tokens)},
        counts=freq,
        sampling_table=table,
    )


def sgns_loss_and_grad(center_vec, positive_vec, negative_vecs):
    """Loss and exact gradients for one SGNS example.

    loss = -log sigma(u_pos . v) - sum_k log sigma(-u_k . v), sigma clamped to
    [eps, 1-eps] before the log. Returns (loss, grad_center, grad_positive,
    grad_negatives).
    """
    v = np.asarray(center_vec, dtype=np.float64)
    u_pos = np.asarray(positive_vec, dtype=np.float64)
    u_neg = np.asarray(negative_vecs, dtype=np.float64).reshape(-1, v.shape[0])
    s_pos = expit(u_pos @ v)
    s_neg = expit(u_neg @ v)
    loss = -np.log(np.clip(s_pos, _LOG_EPS, 1 - _LOG_EPS))
    loss -= np.log(np.clip(1.0 - s_neg, _LOG_EPS, 1 - _LOG_EPS)).sum()
    grad_center = (s_pos - 1.0) * u_pos + s_neg @ u_neg
    grad_positive = (s_pos - 1.0) * v
    grad_negatives = s_neg[:, None] * v[None, :]
    return float(loss), grad_center, grad_positive, grad_negatives


def _keep_probabilities(counts: np.ndarray, subsample_t: float) -> np.ndarray | None:
    if subsample_t <= 0:
        return None
    threshold = subsample_t * counts.sum()
    ratio = threshold / counts
    return np.minimum(1.0, np.sqrt(ratio) + ratio)


def train(streams: Iterable, config: EmbedConfig) -> EmbeddingTable:
    """Train SGNS embeddings over token streams (TokenStream or token lists)."""
    docs_tokens = [list(_stream_tokens(s)) for s in streams]
    vocab = build_vocab(docs_tokens, config.min_count, config.table_size)

    rng = np.random.default_rng(config.seed)
    n_vocab, dim = len(vocab), config.dim
    v_in = rng.uniform(-0.5 / dim, 0.5 / dim, size=(n_vocab, dim))
    v_out = np.zeros((n_vocab, dim))

    docs = []
    for tokens in docs_tokens:
        idx = [vocab.index[t] for t in tokens if t in vocab.index]
        if idx:
            docs.append(np.asarray(idx, dtype=np.int64))
    planned = max(1, config.epochs * sum(len(d) for d in docs))
    keep_prob = _keep_probabilities(vocab.counts, config.subsample_t)
    table = vocab.sampling_table
    lr_span = config.lr_end - config.lr_start
    negatives = config.negatives

    processed = 0
    for _ in range(config.epochs):
        for doc in docs:
            n = len(doc)
            lrs = config.lr_start + lr_span * ((processed + np.arange(n)) / planned)
            processed += n
            if keep_prob is not None:
                mask = rng.random(n) < keep_prob[doc]
                kept = doc[mask]
                lrs = lrs[mask]
            else:
                kept = doc
            m = len(kept)
            if m == 0:
                continue
            windows = rng.integers(1, config.window + 1, size=m)
            for i in range(m):
                b = windows[i]
                lo = 0 if i < b else i - b
                contexts = np.concatenate((kept[lo:i], kept[i + 1 : i + b + 1]))
                n_ctx = len(contexts)
                if n_ctx == 0:
                    continue
                if negatives:
                    negs = table[rng.integers(0, len(table), size=(n_ctx, negatives))]
                center = kept[i]
                v = v_in[center]
                lr = lrs[i]
                for t in range(n_ctx):
                    ctx = contexts[t]
                    if negatives:
                        row = negs[t]
                        row = row[row != ctx]  # drawing the positive yields no update
                        out_idx = np.concatenate(([ctx], row))
                    else:
                        out_idx = np.asarray([ctx])
                    u = v_out[out_idx]
                    g = expit(u @ v)
                    g[0] -= 1.0
                    grad_v = g @ u
                    np.add.at(v_out, out_idx, (-lr * g)[:, None] * v[None, :])
                    v = v - lr * grad_v
                v_in[center] = v
    return EmbeddingTable(vocab=vocab, input_vectors=v_in, output_vectors=v_out)


def lookup(table: EmbeddingTable, token: str) -> np.ndarray | None:
    idx = table.vocab.index.get(token)
    return None if idx is None else table.input_vectors[idx]


def save_text(table: EmbeddingTable, sink) -> None:
    """word2vec text format: "<vocab> <dim>" header, then token + dim reals."""
    lines = [f"{len(table.vocab)} {table.dim}"]
    for i, token in enumerate(table.vocab.tokens):
        if " " in token or not token:
            raise FormatError(f"token {token!r} cannot be serialized in text format")
        values = " ".join(f"{x:.8f}" for x in table.input_vectors[i])
        lines.append(f"{token} {values}")
    payload = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def load_text(source) -> EmbeddingTable:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty embedding file")
    header = lines[0].split()
    if len(header) != 2:
        raise FormatError(f"line 1: expected '<vocab_size> <dim>', got {lines[0]!r}")
    try:
        n_vocab, dim = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"line 1: bad header {lines[0]!r}") from None
    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) != n_vocab:
        raise FormatError(f"header declares {n_vocab} rows, found {len(rows)}")
    tokens: list[str] = []
    vectors = np.empty((n_vocab, dim))
    for i, line in enumerate(rows):
        parts = line.split()
        if len(parts) != dim + 1:
            raise FormatError(f"line {i + 2}: expected token + {dim} values, got {len(parts)} fields")
        tokens.append(parts[0])
        vectors[i] = [float(x) for x in parts[1:]]
    vocab = Vocabulary(
        tokens=tokens,
        index={token: i for i, token in enumerate(tokens)},
        counts=np.zeros(n_vocab, dtype=np.int64),  # frequencies are not stored on disk
        sampling_table=np.zeros(0, dtype=np.int64),
    )
    return EmbeddingTable(vocab=vocab, input_vectors=vectors, output_vectors=None)

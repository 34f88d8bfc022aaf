"""Multinomial logistic regression over token embeddings, fit with SAGA.

SAGA keeps one stored gradient per sample and their running average. For
softmax regression the per-sample gradient factors as p_i (x) x_i, so the
memory holds only the C-vector p_i = softmax(W x_i) - onehot(y_i); the L2
term is applied analytically at every step and never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .embed import EmbeddingTable, lookup
from .errors import ConfigurationError, DivergenceError, FormatError


@dataclass
class SagaConfig:
    max_epochs: int = 500
    tol: float = 1e-4          # threshold on per-epoch mean-loss change
    l2: float | None = None    # None -> 1/N at fit time
    seed: int = 0
    step_size: float | None = None  # None -> 1 / (0.25 * max ||x||^2 + l2)

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ConfigurationError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.tol <= 0:
            raise ConfigurationError(f"tol must be > 0, got {self.tol}")


@dataclass(eq=False)
class FeatureSet:
    X: np.ndarray              # N x (dim+1), last column is the bias constant 1
    y: np.ndarray              # N class ids
    labels: list[str]          # id -> label, sorted; dense 0..C-1
    oov_count: int


@dataclass(eq=False)
class SoftmaxModel:
    W: np.ndarray              # C x (dim+1)
    labels: list[str]
    l2: float
    training_log: list[float] = field(default_factory=list)


def _sentence_tokens(sentence) -> Sequence[str]:
    tokens = getattr(sentence, "subtokens", None)
    return sentence.words if tokens is None else tokens


def featurize(sentences: Iterable, table: EmbeddingTable) -> FeatureSet:
    """One row per sub-token: its embedding (zero vector when OOV) plus bias.

    OOV tokens are counted, not imputed: a learned fallback would confound
    strategies that differ precisely in their OOV rates.
    """
    rows: list[np.ndarray] = []
    gold: list[str] = []
    oov = 0
    zero = np.zeros(table.dim)
    for sentence in sentences:
        for token, tag in zip(_sentence_tokens(sentence), sentence.tags):
            vec = lookup(table, token)
            if vec is None:
                vec = zero
                oov += 1
            rows.append(vec)
            gold.append(tag)
    if not rows:
        raise ConfigurationError("cannot featurize an empty sentence sequence")
    labels = sorted(set(gold))
    codec = {label: i for i, label in enumerate(labels)}
    X = np.column_stack([np.asarray(rows), np.ones(len(rows))])
    y = np.asarray([codec[tag] for tag in gold], dtype=np.int64)
    return FeatureSet(X=X, y=y, labels=labels, oov_count=oov)


def softmax_loss_and_grad(W: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy + (l2/2)||W||^2 and its exact gradient."""
    logits = X @ W.T
    lse = logsumexp(logits, axis=1)
    n = X.shape[0]
    loss = float(np.mean(lse - logits[np.arange(n), y]) + 0.5 * l2 * np.sum(W * W))
    probs = np.exp(logits - lse[:, None])
    probs[np.arange(n), y] -= 1.0
    grad = probs.T @ X / n + l2 * W
    return loss, grad


def _softmax_row(scores: np.ndarray) -> np.ndarray:
    shifted = np.exp(scores - scores.max())
    return shifted / shifted.sum()


def saga_fit(features: FeatureSet, config: SagaConfig, debug: bool = False) -> SoftmaxModel:
    """Fit softmax regression with SAGA.

    Per step on sample i:  W <- W - gamma*(g_new - g_old + avg) - gamma*l2*W,
    where avg is the running average of the stored gradients (updated after
    the step). Stops when the per-epoch mean loss changes by less than tol,
    or at max_epochs. With debug=True the memory/average identity is checked
    after every step (small N only).
    """
    X, y = features.X, features.y
    n, dim = X.shape
    n_classes = len(features.labels)
    if n < n_classes:
        raise ConfigurationError(f"need at least as many samples ({n}) as classes ({n_classes})")
    l2 = config.l2 if config.l2 is not None else 1.0 / n
    if config.step_size is not None:
        gamma = config.step_size
    else:
        max_sq = float(np.max(np.einsum("ij,ij->i", X, X)))
        gamma = 1.0 / (0.25 * max_sq + l2)

    rng = np.random.default_rng(config.seed)
    W = np.zeros((n_classes, dim))
    memory = np.zeros((n, n_classes))  # stored p_i; implied gradient is p_i (x) x_i
    avg = np.zeros((n_classes, dim))

    log = [softmax_loss_and_grad(W, X, y, l2)[0]]
    for _ in range(config.max_epochs):
        for i in rng.permutation(n):
            x = X[i]
            p = _softmax_row(W @ x)
            p[y[i]] -= 1.0
            delta = np.outer(p - memory[i], x)
            W *= 1.0 - gamma * l2
            W -= gamma * (delta + avg)
            avg += delta / n
            memory[i] = p
            if debug:
                true_avg = memory.T @ X / n
                if not np.allclose(avg, true_avg, atol=1e-10):
                    raise AssertionError("SAGA gradient-memory identity violated")
        loss = softmax_loss_and_grad(W, X, y, l2)[0]
        if not np.isfinite(loss):
            raise DivergenceError(
                f"SAGA diverged (non-finite loss) with step size {gamma:.3e}", step_size=gamma
            )
        log.append(loss)
        if abs(log[-1] - log[-2]) < config.tol:
            break
    return SoftmaxModel(W=W, labels=list(features.labels), l2=l2, training_log=log)


def predict(model: SoftmaxModel, X: np.ndarray) -> list[str]:
    """Argmax class labels for feature rows; ties go to the lowest class id."""
    X = np.atleast_2d(X)
    if X.shape[1] != model.W.shape[1]:
        raise ConfigurationError(
            f"feature arity {X.shape[1]} does not match model arity {model.W.shape[1]}"
        )
    ids = np.argmax(X @ model.W.T, axis=1)
    return [model.labels[i] for i in ids]


# ---------------------------------------------------------------------------
# Model file format (UTF-8 text):
#   line 1: "softmax v1 <C> <dim+1> <l2>"
#   then C label lines (id order), then C rows of dim+1 decimal reals
# ---------------------------------------------------------------------------


def save_model(model: SoftmaxModel, sink) -> None:
    n_classes, dim1 = model.W.shape
    lines = [f"softmax v1 {n_classes} {dim1} {model.l2!r}"]
    lines.extend(model.labels)
    for row in model.W:
        lines.append(" ".join(repr(float(x)) for x in row))
    payload = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def load_model(source) -> SoftmaxModel:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty softmax model file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "softmax":
        raise FormatError(f"line 1: not a softmax model header: {lines[0]!r}")
    if header[1] != "v1":
        raise FormatError(f"line 1: unsupported softmax model version {header[1]!r}")
    try:
        n_classes, dim1, l2 = int(header[2]), int(header[3]), float(header[4])
    except ValueError:
        raise FormatError(f"line 1: bad header fields in {lines[0]!r}") from None
    if len(lines) != 1 + 2 * n_classes:
        raise FormatError(
            f"truncated softmax model: expected {1 + 2 * n_classes} lines, got {len(lines)}"
        )
    labels = lines[1 : 1 + n_classes]
    W = np.empty((n_classes, dim1))
    for r, line in enumerate(lines[1 + n_classes :]):
        parts = line.split()
        if len(parts) != dim1:
            raise FormatError(f"line {2 + n_classes + r}: expected {dim1} values, got {len(parts)}")
        W[r] = [float(x) for x in parts]
    return SoftmaxModel(W=W, labels=labels, l2=l2)

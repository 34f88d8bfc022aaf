"""SAGA softmax tagger tests: features, gradients, solver, serialization."""

import io

import numpy as np
import pytest

from tokbench import classify, embed
from tokbench.classify import FeatureSet, SagaConfig, featurize, predict, saga_fit
from tokbench.classify import softmax_loss_and_grad
from tokbench.errors import ConfigurationError
from tokbench.nerdata import TaggedSentence


def _table(tokens, dim=4, seed=0):
    corpus = [list(tokens) * 5]
    config = embed.EmbedConfig(dim=dim, window=2, negatives=1, epochs=0,
                               min_count=1, subsample_t=0.0, seed=seed, table_size=100)
    table = embed.train(corpus, config)
    rng = np.random.default_rng(seed)
    table.input_vectors[:] = rng.normal(size=table.input_vectors.shape)
    return table


def _blobs(n=300, seed=0, separation=10.0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [separation, 0.0], [0.0, separation]])
    rows, labels = [], []
    for cls, (name, center) in enumerate(zip("ABC", centers)):
        rows.append(rng.normal(scale=1.0, size=(n // 3, 2)) + center)
        labels += [name] * (n // 3)
    X = np.column_stack([np.vstack(rows), np.ones(n)])
    codec = {label: i for i, label in enumerate(sorted(set(labels)))}
    y = np.array([codec[l] for l in labels])
    return FeatureSet(X=X, y=y, labels=sorted(set(labels)), oov_count=0)


# ---------------------------------------------------------------------------
# featurize
# ---------------------------------------------------------------------------


def test_featurize_all_oov_rows_are_zero_plus_bias():
    table = _table(["known"])
    sentences = [TaggedSentence(words=["miss", "miss2"], tags=["O", "B-X"])]
    features = featurize(sentences, table)
    assert features.oov_count == 2
    assert np.all(features.X[:, :-1] == 0)
    assert np.all(features.X[:, -1] == 1)


def test_featurize_row_count_and_labels():
    table = _table(["a", "b"])
    sentences = [
        TaggedSentence(words=["a", "b"], tags=["B-X", "O"]),
        TaggedSentence(words=["b"], tags=["I-X"]),
    ]
    features = featurize(sentences, table)
    assert features.X.shape == (3, table.dim + 1)
    assert features.labels == ["B-X", "I-X", "O"]
    assert features.y.tolist() == [0, 2, 1]


def test_featurize_oov_count():
    table = _table(["a", "b", "c"])
    words = ["a", "b", "c", "a", "b", "c", "a", "x", "y", "z"]
    sentences = [TaggedSentence(words=words, tags=["O"] * 10)]
    assert featurize(sentences, table).oov_count == 3


def test_featurize_empty_error():
    with pytest.raises(ConfigurationError):
        featurize([], _table(["a"]))


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------


def test_softmax_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(100):
        X = rng.uniform(-1, 1, size=(6, 4))
        y = rng.integers(0, 3, size=6)
        W = rng.uniform(-1, 1, size=(3, 4))
        l2 = float(rng.uniform(0.0, 0.5))
        _, grad = softmax_loss_and_grad(W, X, y, l2)
        numeric = np.zeros_like(W)
        for r in range(3):
            for c in range(4):
                bump = np.zeros_like(W)
                bump[r, c] = h
                numeric[r, c] = (
                    softmax_loss_and_grad(W + bump, X, y, l2)[0]
                    - softmax_loss_and_grad(W - bump, X, y, l2)[0]
                ) / (2 * h)
        rel = np.max(np.abs(grad - numeric)) / max(np.max(np.abs(numeric)), 1e-12)
        assert rel < 1e-5


# ---------------------------------------------------------------------------
# saga_fit
# ---------------------------------------------------------------------------


def test_saga_separable_blobs_reach_full_accuracy():
    features = _blobs()
    model = saga_fit(features, SagaConfig(max_epochs=500, tol=1e-4, seed=0))
    predictions = predict(model, features.X)
    gold = [features.labels[i] for i in features.y]
    assert predictions == gold
    assert len(model.training_log) - 1 < 500  # converged before the cap


def test_saga_huge_l2_collapses_to_majority_class():
    rng = np.random.default_rng(1)
    X = np.column_stack([rng.normal(size=(120, 3)), np.ones(120)])
    y = np.array([1] * 80 + [0] * 20 + [2] * 20)  # majority is class id 1
    features = FeatureSet(X=X, y=y, labels=["A", "B", "C"], oov_count=0)
    model = saga_fit(features, SagaConfig(max_epochs=60, tol=1e-12, l2=1e6, seed=0))
    assert np.max(np.abs(model.W)) < 1e-3
    predictions = predict(model, features.X)
    assert predictions.count("B") > 100


def test_saga_loss_decreases():
    features = _blobs(seed=4, separation=3.0)
    model = saga_fit(features, SagaConfig(max_epochs=50, tol=1e-9, seed=2))
    assert model.training_log[-1] < model.training_log[0]
    assert all(np.isfinite(v) for v in model.training_log)


def test_saga_memory_average_identity_in_debug_mode():
    features = _blobs(n=30, seed=6, separation=2.0)
    saga_fit(features, SagaConfig(max_epochs=3, tol=1e-12, seed=1), debug=True)


def test_saga_deterministic():
    features = _blobs(seed=8)
    config = SagaConfig(max_epochs=20, tol=1e-9, seed=3)
    a = saga_fit(features, config)
    b = saga_fit(features, config)
    assert np.array_equal(a.W, b.W)
    assert a.training_log == b.training_log


def test_saga_needs_enough_samples():
    features = FeatureSet(
        X=np.ones((2, 2)), y=np.array([0, 1]), labels=["A", "B", "C"], oov_count=0
    )
    with pytest.raises(ConfigurationError):
        saga_fit(features, SagaConfig())


def test_saga_config_validation():
    with pytest.raises(ConfigurationError):
        SagaConfig(max_epochs=0)
    with pytest.raises(ConfigurationError):
        SagaConfig(tol=0.0)


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------


def test_predict_zero_weights_tie_goes_to_lowest_id():
    model = classify.SoftmaxModel(W=np.zeros((3, 4)), labels=["A", "B", "C"], l2=0.1)
    assert predict(model, np.ones((5, 4))) == ["A"] * 5


def test_predict_single_class_training_set():
    X = np.column_stack([np.random.default_rng(0).normal(size=(10, 2)), np.ones(10)])
    features = FeatureSet(X=X, y=np.zeros(10, dtype=int), labels=["ONLY"], oov_count=0)
    model = saga_fit(features, SagaConfig(max_epochs=5, tol=1e-9, seed=0))
    assert predict(model, X) == ["ONLY"] * 10


def test_predict_invariant_to_constant_row_shift():
    rng = np.random.default_rng(5)
    W = rng.normal(size=(3, 4))
    X = rng.normal(size=(20, 4))
    base = predict(classify.SoftmaxModel(W=W, labels=["A", "B", "C"], l2=0.0), X)
    shifted = predict(
        classify.SoftmaxModel(W=W + rng.normal(size=(1, 4)), labels=["A", "B", "C"], l2=0.0), X
    )
    assert base == shifted


def test_predict_arity_mismatch():
    model = classify.SoftmaxModel(W=np.zeros((2, 4)), labels=["A", "B"], l2=0.1)
    with pytest.raises(ConfigurationError):
        predict(model, np.ones((3, 5)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_model_save_load_round_trip():
    features = _blobs(n=60, seed=9)
    model = saga_fit(features, SagaConfig(max_epochs=10, tol=1e-9, seed=0))
    buffer = io.StringIO()
    classify.save_model(model, buffer)
    loaded = classify.load_model(io.StringIO(buffer.getvalue()))
    assert np.array_equal(loaded.W, model.W)
    assert loaded.labels == model.labels
    assert loaded.l2 == model.l2


def test_model_load_rejects_bad_files():
    from tokbench.errors import FormatError

    with pytest.raises(FormatError):
        classify.load_model(io.StringIO("not a model\n"))
    with pytest.raises(FormatError):
        classify.load_model(io.StringIO("softmax v2 1 2 0.5\nA\n0.0 0.0\n"))
    with pytest.raises(FormatError):
        classify.load_model(io.StringIO("softmax v1 2 2 0.5\nA\nB\n0.0 0.0\n"))

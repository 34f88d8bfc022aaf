"""Shared fixtures: a small synthetic workspace for pipeline/CLI tests."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
from make_synthetic import make_workspace  # noqa: E402


@pytest.fixture
def small_workspace(tmp_path):
    """Tiny but complete workspace: fast enough for per-stage CLI tests."""
    config_path = make_workspace(
        tmp_path,
        strategies=["word", "bpe-120"],
        corpus_sentences=150,
        ner_sentences=80,
        embed_overrides={"dim": 8, "epochs": 2, "min_count": 1, "table_size": 2000},
        saga_overrides={"max_epochs": 30, "tol": 1e-3},
    )
    return config_path

#!/usr/bin/env python3
"""Write the bundled synthetic agglutinative corpus, NER set, and a ready config.

Usage: python scripts/make_synthetic.py [workspace_dir]

Creates corpus.txt (plain-lines), ner.conll (two-column BIO), and config.json
wired for a 5-strategy run:  tokbench run-all --config <dir>/config.json
"""

import json
import sys
from pathlib import Path

from tokbench import nerdata, synthetic


def make_workspace(
    workspace: Path,
    strategies=("word", "char", "bigram", "trigram", "bpe-1k"),
    corpus_sentences: int = 1000,
    ner_sentences: int = 450,
    embed_overrides: dict | None = None,
    saga_overrides: dict | None = None,
    seed: int = 11,
) -> Path:
    """Generate fixture files plus config.json; returns the config path."""
    workspace.mkdir(parents=True, exist_ok=True)
    generator = synthetic.SyntheticConfig(
        corpus_sentences=corpus_sentences, ner_sentences=ner_sentences
    )
    corpus_path = workspace / "corpus.txt"
    corpus_path.write_text("\n".join(synthetic.make_corpus(generator)) + "\n", encoding="utf-8")
    nerdata.save_conll(synthetic.make_ner(generator), workspace / "ner.conll")

    embed_config = {
        "dim": 24, "window": 3, "negatives": 5, "epochs": 20, "min_count": 2,
        "subsample_t": 0.0, "seed": seed, "table_size": 100000,
    }
    embed_config.update(embed_overrides or {})
    saga_config = {"max_epochs": 500, "tol": 1e-4, "seed": seed}
    saga_config.update(saga_overrides or {})
    config = {
        "language": "xx",
        "out": "runs",
        "corpus": {"path": "corpus.txt", "format": "plain-lines", "min_length": 1},
        "sample": {"size": corpus_sentences, "seed": seed},
        "strategies": list(strategies),
        "bpe": {"marker": True},
        "embed": embed_config,
        "ner": {"path": "ner.conll", "split": {"train_fraction": 0.9, "seed": seed}},
        "saga": saga_config,
    }
    config_path = workspace / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return config_path


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("synthetic_workspace")
    path = make_workspace(target)
    print(f"wrote {path.parent}/: corpus.txt, ner.conll, config.json")
    print(f"next: tokbench run-all --config {path}")

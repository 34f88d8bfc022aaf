"""Experiment orchestration: stage functions, caching, manifest, summary.

Stage outputs live under <out>/<lang>/<strategy>/ with shared inputs one
level up. Every stage is deterministic for a fixed config, so re-running
with unchanged inputs reproduces byte-identical artifacts; existing outputs
are reused unless force=True.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import __version__
from . import bpe, classify, corpus, embed, metrics, nerdata, tokenizers
from .corpus import CorpusSampleConfig
from .embed import EmbedConfig
from .errors import ConfigurationError, MissingArtifactError
from .nerdata import SplitConfig
from .classify import SagaConfig

STRATEGY_ARTIFACTS = ("tokens.txt", "embed.vec", "ner.train", "ner.test", "tagger.model", "report.json")


@dataclass
class ExperimentConfig:
    language: str
    corpus_path: Path
    corpus_format: str
    out_dir: Path
    strategies: list[str] = field(default_factory=lambda: list(tokenizers.DEFAULT_STRATEGIES))
    min_length: int = 200
    sample: CorpusSampleConfig = field(default_factory=CorpusSampleConfig)
    bpe_marker: bool = True
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    ner_path: Path | None = None
    ner_train_path: Path | None = None
    ner_test_path: Path | None = None
    split: SplitConfig = field(default_factory=SplitConfig)
    saga: SagaConfig = field(default_factory=SagaConfig)

    def validate(self) -> None:
        if not self.strategies:
            raise ConfigurationError("strategy list is empty")
        for strategy in self.strategies:
            tokenizers.bpe_target(strategy)  # raises on malformed bpe ids
            if strategy not in ("word", "char", "bigram", "trigram") and not strategy.startswith("bpe-"):
                raise ConfigurationError(f"unknown strategy {strategy!r}")
        if self.corpus_format not in corpus.DUMP_FORMATS:
            raise ConfigurationError(
                f"unknown corpus format {self.corpus_format!r}; expected one of {corpus.DUMP_FORMATS}"
            )
        if not self.corpus_path.exists():
            raise ConfigurationError(f"corpus file not found: {self.corpus_path}")
        predefined = self.ner_train_path is not None and self.ner_test_path is not None
        if not predefined and self.ner_path is None:
            raise ConfigurationError("config needs ner.path, or ner.train_path + ner.test_path")
        for path in (self.ner_path, self.ner_train_path, self.ner_test_path):
            if path is not None and not path.exists():
                raise ConfigurationError(f"NER file not found: {path}")

    def seeds(self) -> dict:
        return {
            "sample": self.sample.seed,
            "split": self.split.seed,
            "embed": self.embed.seed,
            "saga": self.saga.seed,
        }

    def echo(self) -> dict:
        """All gap-fill decisions, surfaced into every report."""
        return {
            "language": self.language,
            "corpus_format": self.corpus_format,
            "min_length": self.min_length,
            "sample_size": self.sample.sample_size,
            "bpe_marker": self.bpe_marker,
            "embed": asdict(self.embed),
            "split_train_fraction": self.split.train_fraction,
            "saga": asdict(self.saga),
            "casefold": True,
            "ner_casefold": True,
            "oov_policy": "zero-vector",
        }


def load_config(path, out_override=None, seed_override=None) -> ExperimentConfig:
    """Parse a JSON experiment config; relative paths resolve against it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    base = path.parent

    def resolve(p):
        return None if p is None else (base / p).resolve()

    try:
        corpus_cfg = raw["corpus"]
        sample_cfg = raw.get("sample", {})
        ner_cfg = raw.get("ner", {})
        split_cfg = ner_cfg.get("split", {})
        cfg = ExperimentConfig(
            language=raw["language"],
            corpus_path=resolve(corpus_cfg["path"]),
            corpus_format=corpus_cfg.get("format", "json-lines"),
            out_dir=resolve(out_override or raw.get("out", "runs")),
            strategies=list(raw.get("strategies", tokenizers.DEFAULT_STRATEGIES)),
            min_length=int(corpus_cfg.get("min_length", 200)),
            sample=CorpusSampleConfig(
                sample_size=int(sample_cfg.get("size", 10000)),
                seed=int(sample_cfg.get("seed", 0)),
            ),
            bpe_marker=bool(raw.get("bpe", {}).get("marker", True)),
            embed=EmbedConfig(**raw.get("embed", {})),
            ner_path=resolve(ner_cfg.get("path")),
            ner_train_path=resolve(ner_cfg.get("train_path")),
            ner_test_path=resolve(ner_cfg.get("test_path")),
            split=SplitConfig(
                train_fraction=float(split_cfg.get("train_fraction", 0.9)),
                seed=int(split_cfg.get("seed", 0)),
            ),
            saga=SagaConfig(**raw.get("saga", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad config {path}: {exc}") from exc
    if seed_override is not None:
        cfg.sample = replace(cfg.sample, seed=seed_override)
        cfg.split = replace(cfg.split, seed=seed_override)
        cfg.embed = replace(cfg.embed, seed=seed_override)
        cfg.saga = replace(cfg.saga, seed=seed_override)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


def lang_dir(cfg: ExperimentConfig) -> Path:
    return cfg.out_dir / cfg.language


def strategy_dir(cfg: ExperimentConfig, strategy: str) -> Path:
    return lang_dir(cfg) / strategy


def _require(path: Path, producer: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"missing artifact {path}; run {producer} first")
    return path


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def stage_ingest(cfg: ExperimentConfig, force: bool = False) -> Path:
    """Parse + filter + clean + sample the corpus into <lang>/corpus.txt."""
    out = lang_dir(cfg) / "corpus.txt"
    if out.exists() and not force:
        return out
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.corpus_path, "rb") as stream:
        articles = corpus.parse_dump(stream, cfg.corpus_format)
        kept = corpus.filter_boilerplate(articles, min_length=cfg.min_length)
        cleaned = (corpus.clean_article(a, cfg.language) for a in kept)
        nonempty = [doc for doc in cleaned if doc.text]
    sampled = corpus.sample(nonempty, cfg.sample)
    corpus.write_corpus(sampled, out)
    return out


def stage_split(cfg: ExperimentConfig, force: bool = False) -> tuple[Path, Path]:
    """Word-level train/test NER files plus the dataset label histogram."""
    train_out = lang_dir(cfg) / "ner_train.conll"
    test_out = lang_dir(cfg) / "ner_test.conll"
    hist_out = lang_dir(cfg) / "label_histogram.csv"
    if train_out.exists() and test_out.exists() and hist_out.exists() and not force:
        return train_out, test_out
    train_out.parent.mkdir(parents=True, exist_ok=True)
    if cfg.ner_train_path is not None and cfg.ner_test_path is not None:
        train = nerdata.parse_conll(cfg.ner_train_path)
        test = nerdata.parse_conll(cfg.ner_test_path)
    else:
        sentences = nerdata.parse_conll(cfg.ner_path)
        train, test = nerdata.split(sentences, cfg.split)
    nerdata.save_conll(train, train_out)
    nerdata.save_conll(test, test_out)
    metrics.emit_histogram_csv(nerdata.label_histogram(train + test), hist_out)
    return train_out, test_out


def stage_train_bpe(cfg: ExperimentConfig, strategy: str, force: bool = False) -> Path | None:
    """Train the strategy's BPE model from the cleaned corpus, if it is a bpe one."""
    target = tokenizers.bpe_target(strategy)
    if target is None:
        return None
    out = strategy_dir(cfg, strategy) / "bpe.model"
    if out.exists() and not force:
        return out
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus_path = _require(lang_dir(cfg) / "corpus.txt", "ingest")
    marker = bpe.DEFAULT_MARKER if cfg.bpe_marker else None
    freqs = bpe.count_words(corpus.read_corpus(corpus_path), marker=marker)
    model = bpe.train(freqs, target, marker=marker)
    bpe.save(model, out)
    return out


def _tokenizer_spec(cfg: ExperimentConfig, strategy: str) -> tokenizers.TokenizerSpec:
    if tokenizers.bpe_target(strategy) is not None:
        model_path = _require(strategy_dir(cfg, strategy) / "bpe.model", "train-bpe")
        return tokenizers.spec_for_strategy(strategy, model=bpe.load(model_path))
    return tokenizers.spec_for_strategy(strategy)


def stage_train_embed(cfg: ExperimentConfig, strategy: str, force: bool = False) -> Path:
    """Tokenize the corpus (tokens.txt + spans sidecar) and train embeddings."""
    sdir = strategy_dir(cfg, strategy)
    tokens_out, vec_out = sdir / "tokens.txt", sdir / "embed.vec"
    if tokens_out.exists() and vec_out.exists() and not force:
        return vec_out
    sdir.mkdir(parents=True, exist_ok=True)
    corpus_path = _require(lang_dir(cfg) / "corpus.txt", "ingest")
    spec = _tokenizer_spec(cfg, strategy)
    streams = [tokenizers.tokenize(line, spec) for line in corpus.read_corpus(corpus_path)]
    tokenizers.save_token_streams(streams, tokens_out, sdir / "tokens.spans")
    table = embed.train(streams, cfg.embed)
    embed.save_text(table, vec_out)
    return vec_out


def stage_prep_ner(cfg: ExperimentConfig, strategy: str, force: bool = False) -> tuple[Path, Path]:
    """Propagate word-level tags onto the strategy's sub-token boundaries."""
    sdir = strategy_dir(cfg, strategy)
    train_out, test_out = sdir / "ner.train", sdir / "ner.test"
    if train_out.exists() and test_out.exists() and not force:
        return train_out, test_out
    sdir.mkdir(parents=True, exist_ok=True)
    word_train = _require(lang_dir(cfg) / "ner_train.conll", "ingest")
    word_test = _require(lang_dir(cfg) / "ner_test.conll", "ingest")
    spec = _tokenizer_spec(cfg, strategy)
    for src, dst in ((word_train, train_out), (word_test, test_out)):
        propagated = [
            nerdata.propagate_tags(s, spec, cfg.language) for s in nerdata.parse_conll(src)
        ]
        nerdata.save_conll(propagated, dst)
    return train_out, test_out


def stage_train_ner(cfg: ExperimentConfig, strategy: str, force: bool = False) -> Path:
    """Fit the SAGA softmax tagger on propagated training data."""
    sdir = strategy_dir(cfg, strategy)
    out = sdir / "tagger.model"
    if out.exists() and not force:
        return out
    table = embed.load_text(_require(sdir / "embed.vec", "train-embed"))
    train_sents = nerdata.parse_conll(_require(sdir / "ner.train", "prep-ner"))
    features = classify.featurize(train_sents, table)
    model = classify.saga_fit(features, cfg.saga)
    classify.save_model(model, out)
    return out


def stage_eval(cfg: ExperimentConfig, strategy: str, force: bool = False) -> Path:
    """Predict on the propagated test set and emit report.json + pr.csv."""
    sdir = strategy_dir(cfg, strategy)
    out = sdir / "report.json"
    if out.exists() and not force:
        return out
    model = classify.load_model(_require(sdir / "tagger.model", "train-ner"))
    table = embed.load_text(_require(sdir / "embed.vec", "train-embed"))
    test_sents = nerdata.parse_conll(_require(sdir / "ner.test", "prep-ner"))
    features = classify.featurize(test_sents, table)
    pred = classify.predict(model, features.X)
    gold = [tag for s in test_sents for tag in s.tags]
    report = metrics.score(gold, pred, strategy=strategy)
    report = replace(
        report, oov_count=features.oov_count, seeds=cfg.seeds(), config=cfg.echo()
    )
    metrics.emit_report_json(report, out)
    metrics.emit_pr_csv(report, sdir / "pr.csv")
    return out


_STAGE_SEQUENCE = (
    ("train-bpe", stage_train_bpe),
    ("train-embed", stage_train_embed),
    ("prep-ner", stage_prep_ner),
    ("train-ner", stage_train_ner),
    ("eval", stage_eval),
)


def run_strategy(cfg: ExperimentConfig, strategy: str, force: bool = False) -> dict:
    """All per-strategy stages; a failure marks this strategy only."""
    row = {
        "strategy": strategy,
        "status": "ok",
        "accuracy": "",
        "macro_f1": "",
        "nonzero_class_count": "",
        "wall_times": {},
    }
    for stage_name, stage_fn in _STAGE_SEQUENCE:
        started = time.perf_counter()
        try:
            stage_fn(cfg, strategy, force=force)
        except Exception as exc:  # noqa: BLE001 - isolate per strategy
            row["status"] = f"failed:{stage_name}: {exc}"
            return row
        row["wall_times"][stage_name] = round(time.perf_counter() - started, 3)
    report = metrics.load_report_json(strategy_dir(cfg, strategy) / "report.json")
    row["accuracy"] = f"{report.accuracy:.6f}"
    row["macro_f1"] = f"{report.macro_f1:.6f}"
    row["nonzero_class_count"] = report.nonzero_class_count
    return row


def write_summary(cfg: ExperimentConfig, rows: list[dict]) -> Path:
    out = lang_dir(cfg) / "summary.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["strategy", "status", "accuracy", "macro_f1", "nonzero_class_count"])
        for row in rows:
            writer.writerow(
                [row["strategy"], row["status"], row["accuracy"], row["macro_f1"],
                 row["nonzero_class_count"]]
            )
    return out


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(cfg: ExperimentConfig, rows: list[dict]) -> Path:
    """Record artifact hashes and wall times for the completed run."""
    base = lang_dir(cfg)
    artifacts = {}
    shared = ["corpus.txt", "ner_train.conll", "ner_test.conll", "label_histogram.csv", "summary.csv"]
    for name in shared:
        path = base / name
        if path.exists():
            artifacts[name] = _sha256(path)
    for row in rows:
        sdir = base / row["strategy"]
        for name in STRATEGY_ARTIFACTS + ("bpe.model", "pr.csv", "tokens.spans"):
            path = sdir / name
            if path.exists():
                artifacts[f"{row['strategy']}/{name}"] = _sha256(path)
    manifest = {
        "toolkit_version": __version__,
        "config": cfg.echo() | {"strategies": cfg.strategies, "seeds": cfg.seeds()},
        "wall_times": {row["strategy"]: row["wall_times"] for row in rows},
        "artifacts": artifacts,
    }
    out = base / "manifest.json"
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def verify_manifest(manifest_path) -> list[str]:
    """Return mismatched or missing artifact names (empty = everything checks out)."""
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    base = manifest_path.parent
    problems = []
    for rel, digest in manifest["artifacts"].items():
        path = base / rel
        if not path.exists():
            problems.append(f"missing: {rel}")
        elif _sha256(path) != digest:
            problems.append(f"hash mismatch: {rel}")
    return problems


def run_all(cfg: ExperimentConfig, jobs: int = 1, force: bool = False) -> list[dict]:
    """Run every stage for every strategy; failures abort only their strategy."""
    stage_ingest(cfg, force=force)
    stage_split(cfg, force=force)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_strategy, [cfg] * len(cfg.strategies), cfg.strategies,
                                 [force] * len(cfg.strategies)))
    else:
        rows = [run_strategy(cfg, strategy, force=force) for strategy in cfg.strategies]
    write_summary(cfg, rows)
    write_manifest(cfg, rows)
    return rows

"""CLI and pipeline orchestration tests."""

import json

from tokbench import bpe, cli, metrics, pipeline


def run(argv):
    return cli.main([str(a) for a in argv])


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def test_missing_config_file_exits_2(tmp_path):
    assert run(["ingest", "--config", tmp_path / "nope.json"]) == 2


def test_invalid_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "config.json"
    bad.write_text('{"language": "xx"}', encoding="utf-8")
    assert run(["ingest", "--config", bad]) == 2
    assert "config" in capsys.readouterr().err


def test_empty_strategy_list_rejected(small_workspace):
    raw = json.loads(small_workspace.read_text(encoding="utf-8"))
    raw["strategies"] = []
    small_workspace.write_text(json.dumps(raw), encoding="utf-8")
    assert run(["ingest", "--config", small_workspace]) == 2


def test_unknown_strategy_flag_exits_2(small_workspace):
    assert run(["train-bpe", "--config", small_workspace, "--strategy", "zigzag"]) == 2


# ---------------------------------------------------------------------------
# stage sequencing
# ---------------------------------------------------------------------------


def test_eval_before_training_names_producer(small_workspace, capsys):
    assert run(["ingest", "--config", small_workspace]) == 0
    assert run(["prep-ner", "--config", small_workspace, "--strategy", "word"]) == 0
    code = run(["eval", "--config", small_workspace, "--strategy", "word"])
    assert code == 3
    assert "run train-ner first" in capsys.readouterr().err


def test_prep_ner_for_bpe_strategy_requires_model(small_workspace, capsys):
    assert run(["ingest", "--config", small_workspace]) == 0
    assert run(["prep-ner", "--config", small_workspace, "--strategy", "bpe-120"]) == 3
    assert "run train-bpe first" in capsys.readouterr().err


def test_train_embed_requires_ingest(small_workspace, capsys):
    assert run(["train-embed", "--config", small_workspace]) == 3
    assert "run ingest first" in capsys.readouterr().err


def test_stagewise_pipeline_produces_all_artifacts(small_workspace):
    base = small_workspace.parent / "runs" / "xx"
    for command in ("ingest", "train-bpe", "train-embed", "prep-ner", "train-ner", "eval"):
        assert run([command, "--config", small_workspace]) == 0, command
    for strategy in ("word", "bpe-120"):
        for name in pipeline.STRATEGY_ARTIFACTS:
            assert (base / strategy / name).exists(), f"{strategy}/{name}"
    assert (base / "label_histogram.csv").exists()
    # report subcommand rebuilds the summary and exports flat-named copies
    export = small_workspace.parent / "flat"
    assert run(["report", "--config", small_workspace, "--export-dir", export]) == 0
    assert (base / "summary.csv").exists()
    assert (export / "xx_word_report.json").exists()


def test_train_bpe_five_paper_targets(small_workspace):
    raw = json.loads(small_workspace.read_text(encoding="utf-8"))
    raw["strategies"] = ["bpe-5000", "bpe-10000", "bpe-25000", "bpe-50000", "bpe-100000"]
    small_workspace.write_text(json.dumps(raw), encoding="utf-8")
    assert run(["ingest", "--config", small_workspace]) == 0
    assert run(["train-bpe", "--config", small_workspace]) == 0
    base = small_workspace.parent / "runs" / "xx"
    for strategy in raw["strategies"]:
        model = bpe.load(base / strategy / "bpe.model")
        # tiny corpus: every target stops early, and the file records it
        assert model.achieved_vocab < int(strategy.split("-")[1])


def test_train_bpe_writes_model_with_achieved_vocab(small_workspace):
    assert run(["ingest", "--config", small_workspace]) == 0
    assert run(["train-bpe", "--config", small_workspace]) == 0
    model_path = small_workspace.parent / "runs" / "xx" / "bpe-120" / "bpe.model"
    model = bpe.load(model_path)
    assert model.achieved_vocab == len(model.alphabet) + len(model.merges)
    assert model.marker == bpe.DEFAULT_MARKER
    # word strategy has no BPE artifact
    assert not (small_workspace.parent / "runs" / "xx" / "word" / "bpe.model").exists()


# ---------------------------------------------------------------------------
# run-all
# ---------------------------------------------------------------------------


def test_run_all_summary_and_reports(small_workspace, capsys):
    assert run(["run-all", "--config", small_workspace]) == 0
    base = small_workspace.parent / "runs" / "xx"
    lines = (base / "summary.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "strategy,status,accuracy,macro_f1,nonzero_class_count"
    assert len(lines) == 3
    assert lines[1].startswith("word,ok,")
    report = metrics.load_report_json(base / "word" / "report.json")
    assert report.strategy == "word"
    assert report.scoring_unit == "subtoken"
    assert report.seeds["embed"] == 11
    assert report.config["oov_policy"] == "zero-vector"
    assert "word" in capsys.readouterr().out


def test_run_all_reuses_cached_strategies(small_workspace):
    assert run(["run-all", "--config", small_workspace]) == 0
    base = small_workspace.parent / "runs" / "xx"
    word_report = base / "word" / "report.json"
    bpe_report = base / "bpe-120" / "report.json"
    word_before = word_report.stat().st_mtime_ns
    # wipe one strategy; rerun regenerates only that one
    import shutil

    shutil.rmtree(base / "bpe-120")
    assert run(["run-all", "--config", small_workspace]) == 0
    assert bpe_report.exists()
    assert word_report.stat().st_mtime_ns == word_before


def test_run_all_parallel_jobs_match_serial(small_workspace):
    assert run(["run-all", "--config", small_workspace, "--jobs", "2"]) == 0
    base = small_workspace.parent / "runs" / "xx"
    serial_dir = small_workspace.parent / "serial"
    assert run(["run-all", "--config", small_workspace, "--out", serial_dir]) == 0
    parallel = (base / "summary.csv").read_bytes()
    serial = (serial_dir / "xx" / "summary.csv").read_bytes()
    assert parallel == serial


def test_run_all_isolates_strategy_failure(small_workspace, capsys):
    raw = json.loads(small_workspace.read_text(encoding="utf-8"))
    raw["strategies"] = ["word", "bpe-2"]  # target below the base alphabet size
    small_workspace.write_text(json.dumps(raw), encoding="utf-8")
    assert run(["run-all", "--config", small_workspace]) == 1
    base = small_workspace.parent / "runs" / "xx"
    lines = (base / "summary.csv").read_text(encoding="utf-8").splitlines()
    assert lines[1].startswith("word,ok,")
    assert lines[2].startswith("bpe-2,failed:train-bpe")
    assert (base / "word" / "report.json").exists()
    assert not (base / "bpe-2" / "report.json").exists()


def test_strategy_filter_runs_subset(small_workspace):
    assert run(["run-all", "--config", small_workspace, "--strategy", "word"]) == 0
    base = small_workspace.parent / "runs" / "xx"
    assert (base / "word" / "report.json").exists()
    assert not (base / "bpe-120").exists()


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


def test_manifest_verifies_and_detects_tampering(small_workspace):
    assert run(["run-all", "--config", small_workspace]) == 0
    manifest = small_workspace.parent / "runs" / "xx" / "manifest.json"
    assert pipeline.verify_manifest(manifest) == []
    target = small_workspace.parent / "runs" / "xx" / "word" / "tokens.txt"
    target.write_text("tampered\n", encoding="utf-8")
    problems = pipeline.verify_manifest(manifest)
    assert problems == ["hash mismatch: word/tokens.txt"]


# ---------------------------------------------------------------------------
# seed override
# ---------------------------------------------------------------------------


def test_seed_override_applies_to_all_stages(small_workspace):
    cfg = pipeline.load_config(small_workspace, seed_override=77)
    assert cfg.seeds() == {"sample": 77, "split": 77, "embed": 77, "saga": 77}

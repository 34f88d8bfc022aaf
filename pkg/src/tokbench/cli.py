"""Command-line interface: one subcommand per pipeline stage plus run-all.

Exit codes: 0 success, 2 configuration/usage error, 3 missing upstream
artifact, 4 malformed input or artifact file, 5 optimizer divergence,
1 anything unexpected.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from pathlib import Path

from . import metrics, pipeline
from .errors import (
    ConfigurationError,
    DivergenceError,
    FormatError,
    MissingArtifactError,
    TokbenchError,
)

_EXIT_CODES = (
    (ConfigurationError, 2),
    (MissingArtifactError, 3),
    (FormatError, 4),
    (DivergenceError, 5),
    (TokbenchError, 1),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokbench",
        description="Tokenization-strategy benchmark: corpus -> embeddings -> NER tagger -> report.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config (JSON)")
    common.add_argument("--out", default=None, help="output directory (overrides config)")
    common.add_argument("--seed", type=int, default=None, help="override every stage seed")
    common.add_argument("--jobs", type=int, default=1, help="parallel strategy jobs (run-all)")
    common.add_argument("--force", action="store_true", help="recompute existing artifacts")
    common.add_argument(
        "--strategy", action="append", default=None,
        help="limit to this strategy id (repeatable)",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse, clean, and sample the corpus")
    sub.add_parser("train-bpe", parents=[common], help="train BPE models for all bpe strategies")
    sub.add_parser("train-embed", parents=[common], help="tokenize the corpus and train embeddings")
    sub.add_parser("prep-ner", parents=[common], help="split NER data and propagate tags")
    sub.add_parser("train-ner", parents=[common], help="fit the SAGA softmax tagger")
    sub.add_parser("eval", parents=[common], help="score the tagger and emit reports")
    sub.add_parser("run-all", parents=[common], help="run every stage for every strategy")
    report = sub.add_parser("report", parents=[common], help="rebuild the summary from reports")
    report.add_argument(
        "--export-dir", default=None,
        help="also copy reports to <dir>/<lang>_<strategy>_report.json",
    )
    return parser


def _strategies(cfg: pipeline.ExperimentConfig, args) -> list[str]:
    if not args.strategy:
        return cfg.strategies
    unknown = [s for s in args.strategy if s not in cfg.strategies]
    if unknown:
        raise ConfigurationError(f"strategies {unknown} are not in the config strategy list")
    return args.strategy


def _cmd_stagewise(cfg, args, stage_fn, needs_strategy: bool) -> None:
    if not needs_strategy:
        stage_fn(cfg, force=args.force)
        return
    for strategy in _strategies(cfg, args):
        stage_fn(cfg, strategy, force=args.force)


def _cmd_run_all(cfg, args) -> int:
    if args.strategy:
        cfg.strategies = _strategies(cfg, args)
    rows = pipeline.run_all(cfg, jobs=args.jobs, force=args.force)
    _print_summary(rows)
    return 0 if all(row["status"] == "ok" for row in rows) else 1


def _print_summary(rows: list[dict]) -> None:
    print(f"{'strategy':<12} {'status':<10} {'accuracy':>10} {'macro_f1':>10} {'nonzero':>8}")
    for row in rows:
        status = row["status"] if row["status"] == "ok" else "failed"
        print(
            f"{row['strategy']:<12} {status:<10} {str(row['accuracy']):>10} "
            f"{str(row['macro_f1']):>10} {str(row['nonzero_class_count']):>8}"
        )


def _cmd_report(cfg, args) -> int:
    rows = []
    for strategy in _strategies(cfg, args):
        report_path = pipeline.strategy_dir(cfg, strategy) / "report.json"
        if not report_path.exists():
            raise MissingArtifactError(f"missing artifact {report_path}; run eval first")
        report = metrics.load_report_json(report_path)
        rows.append(
            {
                "strategy": strategy,
                "status": "ok",
                "accuracy": f"{report.accuracy:.6f}",
                "macro_f1": f"{report.macro_f1:.6f}",
                "nonzero_class_count": report.nonzero_class_count,
                "wall_times": {},
            }
        )
        if getattr(args, "export_dir", None):
            export_dir = Path(args.export_dir)
            export_dir.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(
                report_path, export_dir / f"{cfg.language}_{strategy}_report.json"
            )
    pipeline.write_summary(cfg, rows)
    _print_summary(rows)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = pipeline.load_config(args.config, out_override=args.out, seed_override=args.seed)
        if args.command == "ingest":
            _cmd_stagewise(cfg, args, pipeline.stage_ingest, needs_strategy=False)
            _cmd_stagewise(cfg, args, pipeline.stage_split, needs_strategy=False)
        elif args.command == "train-bpe":
            _cmd_stagewise(cfg, args, pipeline.stage_train_bpe, needs_strategy=True)
        elif args.command == "train-embed":
            _cmd_stagewise(cfg, args, pipeline.stage_train_embed, needs_strategy=True)
        elif args.command == "prep-ner":
            _cmd_stagewise(cfg, args, pipeline.stage_prep_ner, needs_strategy=True)
        elif args.command == "train-ner":
            _cmd_stagewise(cfg, args, pipeline.stage_train_ner, needs_strategy=True)
        elif args.command == "eval":
            _cmd_stagewise(cfg, args, pipeline.stage_eval, needs_strategy=True)
        elif args.command == "run-all":
            return _cmd_run_all(cfg, args)
        elif args.command == "report":
            return _cmd_report(cfg, args)
    except TokbenchError as exc:
        print(f"tokbench {args.command}: {exc}", file=sys.stderr)
        for err_type, code in _EXIT_CODES:
            if isinstance(exc, err_type):
                return code
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

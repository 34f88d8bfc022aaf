"""Evaluation: accuracy, per-class precision/recall/F1, unweighted macro F1.

The evaluation label set is the union of gold and predicted labels, so a
class that is never predicted still drags the macro average down, and the
"classes with any precision or recall" count is well defined. Undefined
ratios (zero denominators) score 0.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import ConfigurationError, FormatError

SCORING_UNIT = "subtoken"


@dataclass
class ClassScore:
    label: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    strategy: str
    accuracy: float
    macro_f1: float
    per_class: list[ClassScore]
    nonzero_class_count: int
    class_total: int
    oov_count: int = 0
    seeds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    scoring_unit: str = SCORING_UNIT


def score(gold: Sequence[str], pred: Sequence[str], strategy: str = "") -> EvalReport:
    """Score predictions against gold labels of equal length."""
    if len(gold) != len(pred) or not gold:
        raise ConfigurationError(
            f"need equal nonzero label counts, got {len(gold)} gold / {len(pred)} predicted"
        )
    gold_counts = Counter(gold)
    pred_counts = Counter(pred)
    tp_counts = Counter(g for g, p in zip(gold, pred) if g == p)
    labels = sorted(gold_counts.keys() | pred_counts.keys())

    per_class = []
    for label in labels:
        tp = tp_counts[label]
        fp = pred_counts[label] - tp
        fn = gold_counts[label] - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append(
            ClassScore(
                label=label, tp=tp, fp=fp, fn=fn,
                precision=precision, recall=recall, f1=f1, support=tp + fn,
            )
        )
    accuracy = sum(tp_counts.values()) / len(gold)
    macro_f1 = sum(c.f1 for c in per_class) / len(per_class)
    report = EvalReport(
        strategy=strategy,
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class=per_class,
        nonzero_class_count=0,
        class_total=len(per_class),
    )
    count, _ = nonzero_class_count(report)
    return replace(report, nonzero_class_count=count)


def nonzero_class_count(report: EvalReport) -> tuple[int, int]:
    """(classes with precision > 0 or recall > 0, evaluation label total)."""
    count = sum(1 for c in report.per_class if c.precision > 0 or c.recall > 0)
    return count, len(report.per_class)


# ---------------------------------------------------------------------------
# Report JSON and plot-ready CSVs
# ---------------------------------------------------------------------------


def _round6(x: float) -> float:
    return round(float(x), 6)


def _report_payload(report: EvalReport) -> dict:
    # Fixed key order + 6-decimal reals: emitted reports diff bit-exactly.
    return {
        "strategy": report.strategy,
        "scoring_unit": report.scoring_unit,
        "accuracy": _round6(report.accuracy),
        "macro_f1": _round6(report.macro_f1),
        "nonzero_class_count": report.nonzero_class_count,
        "class_total": report.class_total,
        "oov_count": report.oov_count,
        "seeds": {k: report.seeds[k] for k in sorted(report.seeds)},
        "config": {k: report.config[k] for k in sorted(report.config)},
        "per_class": [
            {
                "label": c.label,
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "precision": _round6(c.precision),
                "recall": _round6(c.recall),
                "f1": _round6(c.f1),
                "support": c.support,
            }
            for c in report.per_class
        ],
    }


def emit_report_json(report: EvalReport, sink) -> None:
    payload = json.dumps(_report_payload(report), ensure_ascii=False, indent=2) + "\n"
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def load_report_json(source) -> EvalReport:
    if hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    try:
        per_class = [ClassScore(**entry) for entry in data["per_class"]]
        return EvalReport(
            strategy=data["strategy"],
            accuracy=data["accuracy"],
            macro_f1=data["macro_f1"],
            per_class=per_class,
            nonzero_class_count=data["nonzero_class_count"],
            class_total=data["class_total"],
            oov_count=data["oov_count"],
            seeds=data["seeds"],
            config=data["config"],
            scoring_unit=data["scoring_unit"],
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed report JSON: {exc}") from exc


def emit_pr_csv(report: EvalReport, sink) -> None:
    """Per-class precision/recall CSV (one row per evaluation label)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["label", "precision", "recall", "f1", "support"])
    for c in report.per_class:
        writer.writerow(
            [c.label, f"{c.precision:.6f}", f"{c.recall:.6f}", f"{c.f1:.6f}", c.support]
        )
    _write_text(sink, buffer.getvalue())


def emit_histogram_csv(histogram: dict, sink) -> None:
    """Label histogram CSV, sorted by count descending (label breaks ties)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["label", "count"])
    for label, count in sorted(histogram.items(), key=lambda kv: (-kv[1], kv[0])):
        writer.writerow([label, count])
    _write_text(sink, buffer.getvalue())


def _write_text(sink, payload: str) -> None:
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)

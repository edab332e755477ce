"""Hand-rolled classification metrics over class-abbreviation strings.

Everything operates on plain strings so purist and pragmatic evaluations
share one code path. Precision for a class with no predicted instances is
0, not NaN. Micro-averaged precision, recall and F1 all collapse to
accuracy in single-label classification; the report still carries them so
the collapse is visible rather than assumed.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

# Bucket for predictions that failed to parse at all. It participates as a
# predicted class (inflating false negatives of the gold class) but never
# as a gold class.
SYSTEM_INVALID = "SYSTEM_INVALID"


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Report:
    classes: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]  # rows gold, columns predicted
    per_class: dict[str, ClassScores]
    accuracy: float
    micro: ClassScores
    macro: ClassScores
    weighted: ClassScores
    total: int


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def confusion(
    golds: Sequence[str], preds: Sequence[str], classes: Sequence[str]
) -> tuple[tuple[int, ...], ...]:
    """Confusion matrix with gold on rows and predictions on columns."""
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} golds vs {len(preds)} predictions")
    index = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for g, p in zip(golds, preds):
        if g not in index:
            raise ValueError(f"gold class {g!r} not in class list {list(classes)}")
        if p not in index:
            raise ValueError(f"predicted class {p!r} not in class list {list(classes)}")
        counts[index[g]][index[p]] += 1
    return tuple(tuple(row) for row in counts)


def report_from_matrix(
    matrix: Sequence[Sequence[int]], classes: Sequence[str]
) -> Report:
    """Build the full report from an existing confusion matrix."""
    n = len(classes)
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ValueError(f"matrix shape does not match {n} classes")
    total = sum(sum(row) for row in matrix)
    per_class: dict[str, ClassScores] = {}
    diag = 0
    for i, cls in enumerate(classes):
        tp = matrix[i][i]
        diag += tp
        support = sum(matrix[i])
        predicted = sum(matrix[r][i] for r in range(n))
        precision = _safe_div(tp, predicted)
        recall = _safe_div(tp, support)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[cls] = ClassScores(precision, recall, f1, support)
    accuracy = _safe_div(diag, total)
    micro = ClassScores(accuracy, accuracy, accuracy, total)
    scored = [per_class[c] for c in classes]
    macro = ClassScores(
        _safe_div(sum(s.precision for s in scored), n),
        _safe_div(sum(s.recall for s in scored), n),
        _safe_div(sum(s.f1 for s in scored), n),
        total,
    )
    weighted = ClassScores(
        _safe_div(sum(s.precision * s.support for s in scored), total),
        _safe_div(sum(s.recall * s.support for s in scored), total),
        _safe_div(sum(s.f1 * s.support for s in scored), total),
        total,
    )
    return Report(
        tuple(classes),
        tuple(tuple(row) for row in matrix),
        per_class,
        accuracy,
        micro,
        macro,
        weighted,
        total,
    )


def class_report(
    golds: Sequence[str], preds: Sequence[str], classes: Sequence[str]
) -> Report:
    return report_from_matrix(confusion(golds, preds, classes), classes)


def distribution(values: Iterable[str], classes: Sequence[str]) -> dict[str, int]:
    """Class counts in a fixed class order; unknown classes are an error."""
    counts = {c: 0 for c in classes}
    for v in values:
        if v not in counts:
            raise ValueError(f"class {v!r} not in class list {list(classes)}")
        counts[v] += 1
    return counts


@dataclass(frozen=True)
class Aggregate:
    mean: float
    sd: float
    n: int


def aggregate_runs(values: Sequence[float], sample: bool = False) -> Aggregate:
    """Mean and standard deviation across repeated runs.

    Population SD by default (the n runs are the whole set being
    summarised, not a sample from a larger one); pass ``sample=True`` for
    the n-1 denominator.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("no values to aggregate")
    mean = statistics.fmean(vals)
    if len(vals) == 1:
        sd = 0.0
    elif sample:
        sd = statistics.stdev(vals, xbar=mean)
    else:
        sd = statistics.pstdev(vals, mu=mean)
    return Aggregate(mean, sd, len(vals))


def aggregate_metric_runs(
    runs: Sequence[Mapping[str, float]], sample: bool = False
) -> dict[str, Aggregate]:
    """Aggregate several runs' scalar metric dicts key by key."""
    if not runs:
        raise ValueError("no runs to aggregate")
    keys = list(runs[0])
    for i, run in enumerate(runs[1:], start=2):
        if list(run) != keys:
            raise ValueError(f"run {i} metric keys differ from run 1")
    return {k: aggregate_runs([run[k] for run in runs], sample=sample) for k in keys}


def report_to_dict(report: Report) -> dict:
    """Report as plain JSON-serializable data (the machine-readable twin)."""
    return {
        "classes": list(report.classes),
        "matrix": [list(row) for row in report.matrix],
        "per_class": {
            c: {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "support": s.support,
            }
            for c, s in report.per_class.items()
        },
        "accuracy": report.accuracy,
        "micro": {"precision": report.micro.precision, "recall": report.micro.recall,
                  "f1": report.micro.f1},
        "macro": {"precision": report.macro.precision, "recall": report.macro.recall,
                  "f1": report.macro.f1},
        "weighted": {"precision": report.weighted.precision,
                     "recall": report.weighted.recall, "f1": report.weighted.f1},
        "total": report.total,
    }


def _fmt(x: float | None) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.4f}"


def render_report(report: Report) -> str:
    """Render a report as TSV: per-class rows, then summary rows."""
    lines = ["class\tprecision\trecall\tf1\tsupport"]
    for cls in report.classes:
        s = report.per_class[cls]
        lines.append(f"{cls}\t{_fmt(s.precision)}\t{_fmt(s.recall)}\t{_fmt(s.f1)}\t{s.support}")
    lines.append(f"accuracy\t\t\t{_fmt(report.accuracy)}\t{report.total}")
    for name, s in (("micro", report.micro), ("macro", report.macro), ("weighted", report.weighted)):
        lines.append(f"{name}\t{_fmt(s.precision)}\t{_fmt(s.recall)}\t{_fmt(s.f1)}\t{s.support}")
    return "\n".join(lines) + "\n"


def render_confusion(report: Report) -> str:
    """Render the confusion matrix as TSV (gold rows, predicted columns)."""
    lines = ["gold\\pred\t" + "\t".join(report.classes)]
    for cls, row in zip(report.classes, report.matrix):
        lines.append(cls + "\t" + "\t".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def render_distribution(counts: Mapping[str, int]) -> str:
    """Render class counts as TSV with a trailing total row."""
    lines = ["class\tcount"]
    for cls, count in counts.items():
        lines.append(f"{cls}\t{count}")
    lines.append(f"total\t{sum(counts.values())}")
    return "\n".join(lines) + "\n"

"""Scoring predictions against gold labels.

Confusion counts treat "Yes" (check-worthy) as the positive class; the
headline metric is the positive-class F1, the task's official measure. Any
0/0 metric ratio is defined as 0, which matters for degenerate all-one-class
predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import Dataset, Label
from .errors import AlignmentError, ParseError, UsageError

PREDICTION_HEADER = ("tweet_id", "label", "score")


@dataclass(frozen=True)
class Prediction:
    id: str
    label: Label
    score: float   # positive-class confidence in [0, 1]


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    per_class: dict[Label, ClassMetrics]

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def headline_f1_positive(self) -> float:
        return self.per_class[Label.YES].f1


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else 0.0


def _f1(precision: float, recall: float) -> float:
    return _ratio(2.0 * precision * recall, precision + recall)


def evaluate(gold: Dataset, predictions: list[Prediction]) -> EvalReport:
    """Confusion matrix, accuracy and per-class precision/recall/F1.

    Every gold id must appear exactly once in the predictions; offenders are
    collected into the alignment error rather than reported one at a time.
    """
    if not gold.labeled:
        raise UsageError("gold dataset must be fully labeled")

    by_id: dict[str, Prediction] = {}
    duplicates = []
    for pred in predictions:
        if pred.id in by_id:
            duplicates.append(pred.id)
        by_id[pred.id] = pred
    gold_ids = {row.id for row in gold.rows}
    missing = [row.id for row in gold.rows if row.id not in by_id]
    extra = [pid for pid in by_id if pid not in gold_ids]
    if missing or extra or duplicates:
        raise AlignmentError(missing=missing, extra=extra, duplicates=duplicates)

    tp = fp = fn = tn = 0
    for row in gold.rows:
        predicted = by_id[row.id].label
        if row.label is Label.YES:
            if predicted is Label.YES:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Label.YES:
                fp += 1
            else:
                tn += 1

    total = tp + fp + fn + tn
    accuracy = _ratio(tp + tn, total)
    p_yes = _ratio(tp, tp + fp)
    r_yes = _ratio(tp, tp + fn)
    p_no = _ratio(tn, tn + fn)
    r_no = _ratio(tn, tn + fp)
    per_class = {
        Label.YES: ClassMetrics(p_yes, r_yes, _f1(p_yes, r_yes)),
        Label.NO: ClassMetrics(p_no, r_no, _f1(p_no, r_no)),
    }
    return EvalReport(tp=tp, fp=fp, fn=fn, tn=tn, accuracy=accuracy, per_class=per_class)


def format_report(report: EvalReport, model_name: str = "model") -> str:
    """Fixed-width two-row-per-model table, percentages to 2 decimals,
    followed by the raw fractions and confusion counts."""
    lines = [
        f"{'Class label':<12}{'Model':<10}{'Accuracy':>10}{'Precision':>11}"
        f"{'Recall':>9}{'F1 Score':>10}",
    ]
    acc = f"{100.0 * report.accuracy:.2f}"
    for label in (Label.NO, Label.YES):
        m = report.per_class[label]
        lines.append(
            f"{label.value:<12}{model_name:<10}{acc:>10}"
            f"{100.0 * m.precision:>11.2f}{100.0 * m.recall:>9.2f}"
            f"{100.0 * m.f1:>10.2f}"
        )
    yes = report.per_class[Label.YES]
    lines.append("")
    lines.append(
        f"positive-class F1 (headline): {yes.f1:.6f} "
        f"({100.0 * yes.f1:.2f}%)"
    )
    lines.append(
        f"confusion: tp={report.tp} fp={report.fp} fn={report.fn} tn={report.tn} "
        f"total={report.total}"
    )
    lines.append(f"accuracy: {report.accuracy:.6f}")
    return "\n".join(lines) + "\n"


def write_predictions(rows: list[Prediction], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(PREDICTION_HEADER) + "\n")
        for row in rows:
            fh.write(f"{row.id}\t{row.label.value}\t{row.score:.6f}\n")


def read_predictions(path: str | Path) -> list[Prediction]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != PREDICTION_HEADER:
        expected = "\\t".join(PREDICTION_HEADER)
        raise ParseError(f"expected header {expected!r}", line=1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 columns, found {len(fields)}", line=lineno)
        pid, label_s, score_s = fields
        label = Label.parse(label_s)
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"bad score {score_s!r}", line=lineno)
        if not 0.0 <= score <= 1.0:
            raise ParseError(f"score {score} outside [0, 1]", line=lineno)
        rows.append(Prediction(id=pid, label=label, score=score))
    return rows

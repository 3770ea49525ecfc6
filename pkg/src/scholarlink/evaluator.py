"""Precision / recall / F against a golden set of author-tweeter pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .matcher import MatchedPair, MatchOutcome, MatchStep, StepCounts, count_pairs

PairLike = MatchedPair | tuple[str, str]


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    true_positives: int
    false_positives: int
    false_negatives: int


@dataclass(frozen=True)
class EvalReport:
    counts: ConfusionCounts
    precision: float
    recall: float
    f_score: float
    # precision over every predicted pair, not only golden tweeters
    unrestricted_precision: float = 1.0
    conventions: tuple[str, ...] = ()


def f_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _key(p) -> tuple[str, str]:
    if isinstance(p, MatchedPair):
        return p.key
    if hasattr(p, "author_id"):
        return p.author_id, p.tweeter_id
    return tuple(p)


def evaluate(predicted: Iterable[PairLike], golden: Iterable) -> EvalReport:
    """Score predicted pairs against golden pairs.

    Precision only looks at predictions for tweeters that occur in the golden
    set; a hit needs the exact (author_id, tweeter_id) pair.
    """
    gold = {_key(g) for g in golden}
    pred = {_key(p) for p in predicted}
    gold_tweeters = {t for _, t in gold}
    restricted = {p for p in pred if p[1] in gold_tweeters}
    tp = len(restricted & gold)
    fp = len(restricted) - tp
    fn = len(gold) - tp

    conventions = []
    if tp + fp == 0:
        precision = 1.0
        conventions.append("precision_empty_prediction")
    else:
        precision = tp / (tp + fp)
    if not gold:
        recall = 1.0
        conventions.append("recall_empty_golden")
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0:
        conventions.append("f_zero_denominator")
    all_tp = len(pred & gold)
    unrestricted = all_tp / len(pred) if pred else 1.0
    return EvalReport(
        counts=ConfusionCounts(tp, fp, fn),
        precision=precision,
        recall=recall,
        f_score=f_score(precision, recall),
        unrestricted_precision=unrestricted,
        conventions=tuple(conventions),
    )


@dataclass(frozen=True)
class TableRow:
    criteria: str
    field: str
    step_id: int | None
    counts: StepCounts
    report: EvalReport


@dataclass
class StepTables:
    per_criterion: list[TableRow] = field(default_factory=list)
    new_pairs: list[TableRow] = field(default_factory=list)
    cumulative: list[TableRow] = field(default_factory=list)

    def as_dict(self) -> dict[str, list[TableRow]]:
        return {
            "per_criterion": self.per_criterion,
            "new_pairs": self.new_pairs,
            "cumulative": self.cumulative,
        }


def _row(step: MatchStep | None, pairs: Iterable[PairLike], gold) -> TableRow:
    keys = {_key(p) for p in pairs}
    if step is None:
        return TableRow("Combined", "Combined", None, count_pairs(keys), evaluate(keys, gold))
    return TableRow(step.criteria_label, step.field_label, step.step_id,
                    count_pairs(keys), evaluate(keys, gold))


def evaluate_per_step(outcome: MatchOutcome, golden: Iterable) -> StepTables:
    """Build the per-criterion, new-pairs and cumulative tables, each with a Combined row."""
    gold = {_key(g) for g in golden}
    tables = StepTables()
    running: set[tuple[str, str]] = set()
    for step in outcome.steps:
        sid = step.step_id
        tables.per_criterion.append(_row(step, outcome.independent_by_step[sid], gold))
        new = outcome.new_pairs_by_step[sid]
        tables.new_pairs.append(_row(step, new, gold))
        running |= {p.key for p in new}
        tables.cumulative.append(_row(step, running, gold))
    combined = _row(None, outcome.combined, gold)
    for rows in tables.as_dict().values():
        rows.append(combined)
    return tables


def summary_dict(report: EvalReport) -> dict:
    c = report.counts
    return {
        "true_positives": c.true_positives,
        "false_positives": c.false_positives,
        "false_negatives": c.false_negatives,
        "precision": report.precision,
        "recall": report.recall,
        "f_score": report.f_score,
        "unrestricted_precision": report.unrestricted_precision,
        "conventions_triggered": list(report.conventions),
    }

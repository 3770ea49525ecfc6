"""Result tables and dataset-overview summaries, written as CSV plus aligned text."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import AuthorRecord, WorkRecord
from .evaluator import StepTables, TableRow
from .matcher import MatchOutcome, write_matches

STEP_TABLE_HEADER = [
    "criteria", "field", "step_id", "authors", "tweeters", "pairs",
    "true_positives", "false_positives", "false_negatives",
    "recall", "precision", "f_score",
]
DISCIPLINE_HEADER = ["discipline", "author_count", "author_percentage", "average_score", "score_sum"]
COUNTRY_HEADER = ["country", "author_count", "author_percentage"]
STEP_TABLE_FILES = {
    "per_criterion": "table_per_criterion",
    "new_pairs": "table_new_pairs",
    "cumulative": "table_cumulative",
}
OTHER_COUNTRIES = "Other countries"


@dataclass(frozen=True)
class DisciplineRow:
    discipline: str
    author_count: int
    author_percentage: float
    average_score: float
    # summed level-0 scores over all matched authors' works
    score_sum: float = 0.0


@dataclass(frozen=True)
class CountryRow:
    country: str
    author_count: int
    author_percentage: float


@dataclass
class DisciplineSummary:
    rows: list[DisciplineRow] = field(default_factory=list)
    excluded: int = 0  # matched authors without any level-0 concept


@dataclass
class CountrySummary:
    rows: list[CountryRow] = field(default_factory=list)
    unknown: int = 0


def fmt_rate(x: float) -> str:
    return f"{x:.3f}"


def fmt_pct(x: float) -> str:
    return f"{x:.1f}"


def discipline_summary(matched_authors: Iterable[str], works: Iterable[WorkRecord]) -> DisciplineSummary:
    """Assign each matched author to the level-0 concept with the largest summed score."""
    matched = set(matched_authors)
    scores: dict[str, dict[str, list[float]]] = {a: {} for a in matched}
    work_counts: Counter = Counter()
    for work in works:
        for a in work.author_ids:
            if a not in matched:
                continue
            work_counts[a] += 1
            for c in work.concepts:
                if c.level == 0:
                    scores[a].setdefault(c.concept_name, []).append(c.score)

    totals: dict[str, list[float]] = {}
    assigned: dict[str, list[float]] = {}
    excluded = 0
    for a in sorted(matched):
        # fsum is exact, so ties do not depend on work order
        sums = {name: math.fsum(vals) for name, vals in scores[a].items()}
        if not sums:
            excluded += 1
            continue
        for name, s in sums.items():
            totals.setdefault(name, []).append(s)
        best = min(sums, key=lambda name: (-sums[name], name))
        assigned.setdefault(best, []).append(sums[best] / work_counts[a])

    n_assigned = sum(len(v) for v in assigned.values())
    rows = []
    for name in totals:
        per_author = assigned.get(name, [])
        rows.append(DisciplineRow(
            discipline=name,
            author_count=len(per_author),
            author_percentage=100.0 * len(per_author) / n_assigned if n_assigned else 0.0,
            average_score=math.fsum(per_author) / len(per_author) if per_author else 0.0,
            score_sum=math.fsum(totals[name]),
        ))
    rows.sort(key=lambda r: (-r.author_count, r.discipline))
    return DisciplineSummary(rows, excluded)


def country_summary(
    matched_authors: Iterable[str],
    authors: dict[str, AuthorRecord] | Iterable[AuthorRecord],
    top_n: int = 19,
) -> CountrySummary:
    if not isinstance(authors, dict):
        authors = {a.author_id: a for a in authors}
    counts: Counter = Counter()
    unknown = 0
    for a in set(matched_authors):
        rec = authors.get(a)
        if rec is None or not rec.country:
            unknown += 1
        else:
            counts[rec.country] += 1
    base = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    rows = [CountryRow(c, n, 100.0 * n / base) for c, n in ranked[:top_n]]
    rest = sum(n for _, n in ranked[top_n:])
    if ranked[top_n:]:
        rows.append(CountryRow(OTHER_COUNTRIES, rest, 100.0 * rest / base))
    return CountrySummary(rows, unknown)


# -- rendering ------------------------------------------------------------------


def step_table_rows(rows: Sequence[TableRow]) -> list[list[str]]:
    out = []
    for r in rows:
        c = r.report.counts
        out.append([
            r.criteria, r.field, "" if r.step_id is None else str(r.step_id),
            str(r.counts.authors), str(r.counts.tweeters), str(r.counts.pairs),
            str(c.true_positives), str(c.false_positives), str(c.false_negatives),
            fmt_rate(r.report.recall), fmt_rate(r.report.precision), fmt_rate(r.report.f_score),
        ])
    return out


def discipline_rows(summary: DisciplineSummary) -> list[list[str]]:
    return [
        [r.discipline, str(r.author_count), fmt_pct(r.author_percentage),
         fmt_rate(r.average_score), fmt_rate(r.score_sum)]
        for r in summary.rows
    ]


def country_rows(summary: CountrySummary) -> list[list[str]]:
    return [[r.country, str(r.author_count), fmt_pct(r.author_percentage)] for r in summary.rows]


def align(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(v)) for w, v in zip(widths, row)]

    def line(vals):
        cells = [v.ljust(w) if i < 2 else v.rjust(w) for i, (v, w) in enumerate(zip(vals, widths))]
        return "  ".join(cells).rstrip()

    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(header), sep, *(line(r) for r in rows)])


def _write(out_dir: Path, stem: str, header, rows, notes: Sequence[str] = ()) -> None:
    with open(out_dir / f"{stem}.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    text = align(header, rows)
    if notes:
        text += "\n\n" + "\n".join(notes)
    (out_dir / f"{stem}.txt").write_text(text + "\n", encoding="utf-8")


def render_tables(
    out_dir,
    outcome: MatchOutcome | None = None,
    tables: StepTables | None = None,
    disciplines: DisciplineSummary | None = None,
    countries: CountrySummary | None = None,
) -> list[Path]:
    """Write whichever outputs are supplied; returns the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    if outcome is not None:
        write_matches(out_dir / "matches.csv", outcome)
        written.append("matches.csv")
    if tables is not None:
        for key, rows in tables.as_dict().items():
            stem = STEP_TABLE_FILES[key]
            notes = sorted({f"note: {conv} convention applied"
                            for r in rows for conv in r.report.conventions})
            _write(out_dir, stem, STEP_TABLE_HEADER, step_table_rows(rows), notes)
            written += [f"{stem}.csv", f"{stem}.txt"]
    if disciplines is not None:
        total = sum(r.author_count for r in disciplines.rows)
        _write(out_dir, "table_disciplines", DISCIPLINE_HEADER, discipline_rows(disciplines),
               [f"assigned authors: {total}",
                f"matched authors without level-0 concepts (excluded): {disciplines.excluded}"])
        written += ["table_disciplines.csv", "table_disciplines.txt"]
    if countries is not None:
        total = sum(r.author_count for r in countries.rows)
        _write(out_dir, "table_countries", COUNTRY_HEADER, country_rows(countries),
               [f"authors with a known country: {total}",
                f"Unknown (no last known affiliation country): {countries.unknown}"])
        written += ["table_countries.csv", "table_countries.txt"]
    if disciplines is not None or countries is not None:
        tallies = {}
        if disciplines is not None:
            tallies["disciplines_excluded"] = disciplines.excluded
        if countries is not None:
            tallies["countries_unknown"] = countries.unknown
        (out_dir / "summary_tallies.json").write_text(
            json.dumps(tallies, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append("summary_tallies.json")
    return [out_dir / name for name in written]


def read_table(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))

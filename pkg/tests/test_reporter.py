from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholarlink.corpus import AuthorRecord, WorkRecord
from scholarlink.evaluator import EvalReport, ConfusionCounts, TableRow, evaluate_per_step
from scholarlink.matcher import StepCounts, build_name_tables, run_hierarchy
from scholarlink.reporter import (
    OTHER_COUNTRIES,
    country_summary,
    discipline_summary,
    fmt_pct,
    fmt_rate,
    read_table,
    render_tables,
    step_table_rows,
)

from conftest import concept


def work(wid, authors, *concepts):
    return WorkRecord(wid, f"10.1/{wid}", tuple(authors), tuple(concepts))


def test_discipline_argmax_and_average():
    works = [
        work("W1", ["A1"], concept("Medicine", 0.6), concept("Biology", 0.2)),
        work("W2", ["A1"], concept("Biology", 0.3)),
        work("W3", ["A2"], concept("Biology", 0.9), concept("Genetics", 5.0, level=1)),
    ]
    s = discipline_summary(["A1", "A2"], works)
    rows = {r.discipline: r for r in s.rows}
    # A1: medicine 0.6 vs biology 0.5 over 2 works
    assert rows["Medicine"].author_count == 1
    assert rows["Medicine"].average_score == pytest.approx(0.3)
    assert rows["Biology"].author_count == 1
    assert rows["Biology"].average_score == pytest.approx(0.9)
    assert rows["Biology"].score_sum == pytest.approx(1.4)
    assert "Genetics" not in rows
    assert s.excluded == 0


def test_discipline_ties_and_exclusion():
    works = [work("W1", ["A1"], concept("Physics", 0.5), concept("Chemistry", 0.5)),
             work("W2", ["A2"]), work("W3", ["A9"], concept("Physics", 1.0))]
    s = discipline_summary(["A1", "A2"], works)
    assert [(r.discipline, r.author_count) for r in s.rows] == [("Chemistry", 1), ("Physics", 0)]
    assert s.excluded == 1


def test_country_collapse_and_unknown():
    authors = {f"A{i}": AuthorRecord(f"A{i}", "x", country=c)
               for i, c in enumerate(["US", "US", "GB", "FR", None, "DE"])}
    s = country_summary(authors, authors, top_n=2)
    assert [(r.country, r.author_count) for r in s.rows] == [("US", 2), ("DE", 1), (OTHER_COUNTRIES, 2)]
    assert s.rows[0].author_percentage == pytest.approx(40.0)
    assert s.unknown == 1
    assert [r.country for r in country_summary(authors, authors, top_n=10).rows] == ["US", "DE", "FR", "GB"]


def test_formatting():
    assert fmt_pct(28.3333) == "28.3"
    assert fmt_rate(0.75501) == "0.755"
    row = TableRow("Combined", "Combined", None, StepCounts(1, 1, 1),
                   EvalReport(ConfusionCounts(0, 0, 0), 0.958, 0.623, 0.75501))
    assert ",".join(step_table_rows([row])[0][-3:]) == "0.623,0.958,0.755"


def test_empty_outcome_tables(tmp_path):
    out = run_hierarchy([], build_name_tables([], []))
    written = render_tables(tmp_path, outcome=out, tables=evaluate_per_step(out, []),
                            disciplines=discipline_summary([], []), countries=country_summary([], {}))
    assert (tmp_path / "matches.csv").read_text().count("\n") == 1
    assert read_table(tmp_path / "table_disciplines.csv") == []
    assert read_table(tmp_path / "table_countries.csv") == []
    assert len(read_table(tmp_path / "table_new_pairs.csv")) == 10
    assert all(p.exists() for p in written)


def test_csv_parses_back(tmp_path):
    works = [work("W1", ["A1"], concept("Medicine", 0.5)), work("W2", ["A2"], concept("Biology", 0.25))]
    authors = {"A1": AuthorRecord("A1", "x", country="US"), "A2": AuthorRecord("A2", "y", country="GB")}
    d, c = discipline_summary(["A1", "A2"], works), country_summary(["A1", "A2"], authors)
    render_tables(tmp_path, disciplines=d, countries=c)
    back = read_table(tmp_path / "table_disciplines.csv")
    assert [(r["discipline"], int(r["author_count"]), float(r["author_percentage"])) for r in back] == [
        (row.discipline, row.author_count, round(row.author_percentage, 1)) for row in d.rows]
    text = (tmp_path / "table_countries.txt").read_text()
    assert "Unknown (no last known affiliation country): 0" in text


eighths = st.integers(1, 8).map(lambda k: k / 8)


@given(st.lists(st.lists(st.tuples(st.sampled_from(["Med", "Bio", "Chem"]), eighths), max_size=3),
                min_size=1, max_size=12),
       st.sampled_from([2.0, 4.0, 0.5]))
def test_scaling_scores(work_specs, factor):
    works = [work(f"W{i}", [f"A{i % 5}"], *(concept(n, s) for n, s in spec)) for i, spec in enumerate(work_specs)]
    scaled = [replace(w, concepts=tuple(replace(c, score=c.score * factor) for c in w.concepts)) for w in works]
    ids = [f"A{i}" for i in range(5)]
    base, big = discipline_summary(ids, works), discipline_summary(ids, scaled)
    assert [(r.discipline, r.author_count, r.author_percentage) for r in base.rows] == [
        (r.discipline, r.author_count, r.author_percentage) for r in big.rows]
    for r, s in zip(base.rows, big.rows):
        assert s.average_score == r.average_score * factor
        assert s.score_sum == r.score_sum * factor


@given(st.lists(st.sampled_from(["US", "GB", "CA", None]), min_size=1, max_size=20), st.integers(2, 4))
def test_country_duplication(countries, k):
    one = {f"A{i}": AuthorRecord(f"A{i}", "x", country=c) for i, c in enumerate(countries)}
    many = {f"A{i}_{j}": AuthorRecord(f"A{i}_{j}", "x", country=c)
            for i, c in enumerate(countries) for j in range(k)}
    a, b = country_summary(one, one), country_summary(many, many)
    assert [(r.country, r.author_count * k) for r in a.rows] == [(r.country, r.author_count) for r in b.rows]
    assert [r.author_percentage for r in a.rows] == pytest.approx([r.author_percentage for r in b.rows])
    assert b.unknown == a.unknown * k

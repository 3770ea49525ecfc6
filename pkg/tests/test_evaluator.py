import random
import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholarlink.corpus import AuthorRecord, TweeterProfile
from scholarlink.evaluator import evaluate, evaluate_per_step, f_score
from scholarlink.matcher import build_name_tables, run_hierarchy


def test_one_hit_one_miss():
    r = evaluate([("A1", "T1"), ("A2", "T3")], [("A1", "T1"), ("A3", "T3")])
    assert (r.counts.true_positives, r.counts.false_positives, r.counts.false_negatives) == (1, 1, 1)
    assert r.precision == 0.5 and r.recall == 0.5 and r.f_score == 0.5


def test_non_golden_tweeter_ignored_for_precision():
    r = evaluate([("A1", "T1"), ("A9", "T9")], [("A1", "T1")])
    assert r.precision == 1.0 and r.recall == 1.0
    assert r.unrestricted_precision == 0.5


def test_golden_tweeter_wrong_author_is_false_positive():
    r = evaluate([("A2", "T1")], [("A1", "T1")])
    assert r.counts.false_positives == 1 and r.precision == 0.0 and r.f_score == 0.0
    assert "f_zero_denominator" in r.conventions


def test_conventions():
    r = evaluate([], [("A1", "T1")])
    assert r.precision == 1.0 and r.recall == 0.0
    assert r.conventions == ("precision_empty_prediction",)
    r = evaluate([("A1", "T1")], [])
    assert r.recall == 1.0 and "recall_empty_golden" in r.conventions
    assert f_score(0.0, 0.0) == 0.0


def test_harmonic_mean_oracle():
    rng = random.Random(2024)
    for _ in range(1000):
        p, r = rng.random() or 0.5, rng.random() or 0.5
        assert f_score(p, r) == pytest.approx(statistics.harmonic_mean([p, r]), rel=1e-12)


unit = st.floats(0.0, 1.0, allow_nan=False)


@given(unit, unit, unit)
def test_monotone_in_precision(p, q, r):
    lo, hi = sorted((p, q))
    assert f_score(lo, r) <= f_score(hi, r) + 1e-12


@given(unit, unit)
def test_bounded_by_min_and_max(p, r):
    f = f_score(p, r)
    assert min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12


def outcome_for(authors, tweeters, cands):
    tables = build_name_tables([AuthorRecord(a, n) for a, n in authors],
                               [TweeterProfile(t, h, p) for t, h, p in tweeters])
    return run_hierarchy(cands, tables)


def test_single_step_degenerate_case():
    out = outcome_for([("A1", "Ann Lee")], [("T1", "annlee", "")], [("A1", "T1")])
    tables = evaluate_per_step(out, [("A1", "T1")])
    first = tables.new_pairs[0]
    assert first.step_id == 1 and first.report.f_score == 1.0
    combined = tables.new_pairs[-1]
    assert combined.criteria == "Combined"
    assert combined.report == first.report
    assert tables.cumulative[0].report == combined.report


def test_new_pair_rows_partition_combined():
    out = outcome_for(
        [("A1", "Ann Lee"), ("A2", "Bo Chen"), ("A3", "Cy Dow")],
        [("T1", "annlee", ""), ("T2", "q", "Bo Chen"), ("T3", "q", "cy dow fan"), ("T4", "q", "Bob Chen")],
        [("A1", "T1"), ("A2", "T2"), ("A3", "T3"), ("A2", "T4")],
    )
    gold = [("A1", "T1"), ("A2", "T2"), ("A3", "T3"), ("A2", "T4")]
    t = evaluate_per_step(out, gold)
    steps = t.new_pairs[:-1]
    assert steps[7].counts.pairs == 1  # bob chen: one given name, so initials == first initial
    assert sum(r.counts.pairs for r in steps) == t.new_pairs[-1].counts.pairs == 4
    assert sum(r.report.counts.true_positives for r in steps) == t.new_pairs[-1].report.counts.true_positives
    zero = [r for r in steps if r.counts.pairs == 0]
    assert zero and all(r.report.precision == 1.0 and "precision_empty_prediction" in r.report.conventions
                        for r in zero)
    assert t.cumulative[-2].report == t.cumulative[-1].report


def test_rounded_rates_bracket_reported_f():
    # F from 3-decimal rates can miss a 3-decimal F; the unrounded interval still reaches it
    corners = [f_score(p, r) for p in (0.9705, 0.9715) for r in (0.4225, 0.4235)]
    assert min(corners) < 0.5895 <= max(corners)
    assert round(f_score(0.971, 0.423), 3) == 0.589

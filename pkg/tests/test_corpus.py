import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholarlink.corpus import (
    AuthorRecord,
    CorpusPaths,
    ExcessiveMalformedRows,
    FileMissing,
    FormatError,
    InvalidDoi,
    TweetEvent,
    WorkRecord,
    build_doi_index,
    load_authors,
    load_corpus,
    load_events,
    load_works,
    normalize_doi,
    write_corpus,
)
from scholarlink.synth import SynthParams, generate_synthetic_corpus


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_authors_clean(tmp_path):
    p = write(tmp_path / "a.csv", "author_id,display_name,orcid,country\n"
              "A1,Ann Lee,,ca\nA2,Bo Chen,0000-0001,\nA3,\"Smith, John\",,US\n")
    authors = load_authors(p)
    assert list(authors) == ["A1", "A2", "A3"]
    assert authors["A1"].country == "CA"
    assert authors["A2"].orcid == "0000-0001" and authors["A2"].country is None
    assert authors["A3"].display_name == "Smith, John"


def test_events_row_without_doi_skipped(tmp_path):
    from scholarlink.corpus import LoadReport

    rows = "".join(f"e{i},T{i},10.1/{i}\n" for i in range(10))
    p = write(tmp_path / "e.csv", "tweet_id,tweeter_id,doi\n" + rows + "e99,T9,\n")
    report = LoadReport()
    events = load_events(p, report)
    assert len(events) == 10
    assert report.files["events"].malformed_count == 1


def test_duplicate_author_first_wins(tmp_path):
    from scholarlink.corpus import LoadReport

    p = write(tmp_path / "a.csv", "author_id,display_name,orcid,country\nA1,Ann Lee,,\nA1,Other Name,,\n")
    report = LoadReport()
    authors = load_authors(p, report)
    assert authors == {"A1": AuthorRecord("A1", "Ann Lee")}
    assert report.files["authors"].duplicates == 1


def test_header_mismatch(tmp_path):
    p = write(tmp_path / "a.csv", "id,name\nA1,Ann\n")
    with pytest.raises(FormatError):
        load_authors(p)


def test_missing_file(tmp_path):
    with pytest.raises(FileMissing):
        load_authors(tmp_path / "nope.csv")


def test_too_many_malformed(tmp_path):
    p = write(tmp_path / "e.csv", "tweet_id,tweeter_id,doi\n"
              + "".join(f"e{i},T1,10.1/{i}\n" for i in range(8)) + "e8,T1,junk\ne9,,10.1/x\n")
    with pytest.raises(ExcessiveMalformedRows):
        load_events(p)


def test_works_parsing(tmp_path):
    lines = [
        {"work_id": "W1", "doi": "https://doi.org/10.5/AB", "author_ids": ["A1", "A1", "A2"],
         "concepts": [{"name": "Medicine", "level": 0, "score": 0.5}]},
        {"work_id": "W2", "doi": "10.5/x", "author_ids": [], "concepts": []},
        {"work_id": "W3", "doi": "10.5/y", "author_ids": ["A1"],
         "concepts": [{"name": "Biology", "level": 0, "score": 1.5}]},
    ]
    p = write(tmp_path / "w.jsonl", "\n".join(json.dumps(x) for x in lines) + "\nnot json\n"
              + "\n".join(json.dumps(x) for x in [{"work_id": f"X{i}", "doi": "10.5/z", "author_ids": ["A9"]}
                                                  for i in range(30)]))
    from scholarlink.corpus import LoadReport

    report = LoadReport()
    works = load_works(p, report)
    assert works[0].doi == "10.5/ab"
    assert works[0].author_ids == ("A1", "A2")
    assert len(works) == 31
    assert report.files["works"].malformed == {
        "no author_ids": 1, "concept out of range": 1, "invalid JSON": 1}


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("https://doi.org/10.1000/ABC", "10.1000/abc"),
        ("10.1000/abc", "10.1000/abc"),
        ("  doi:10.1000/X ", "10.1000/x"),
        ("https://dx.doi.org/10.1/Q", "10.1/q"),
        ("http://doi.org/10.1/Q", "10.1/q"),
    ],
)
def test_normalize_doi(raw, expected):
    assert normalize_doi(raw) == expected


@pytest.mark.parametrize("raw", ["example.com/paper", "", "https://doi.org/", "11.1/x"])
def test_normalize_doi_invalid(raw):
    with pytest.raises(InvalidDoi):
        normalize_doi(raw)


@given(st.sampled_from(["", "doi:", "https://doi.org/", "HTTPS://DX.DOI.ORG/"]), st.text(max_size=20))
def test_normalize_doi_idempotent(prefix, suffix):
    try:
        once = normalize_doi(prefix + "10." + suffix)
    except InvalidDoi:
        return
    assert normalize_doi(once) == once


def test_index_examples():
    idx = build_doi_index([WorkRecord("W1", "d", ("A1", "A2"))], [TweetEvent("e", "T1", "d")])
    assert idx.authors_by_doi == {"d": {"A1", "A2"}}
    assert idx.tweeters_by_doi == {"d": {"T1"}}

    idx = build_doi_index([WorkRecord("W1", "d", ("A1",)), WorkRecord("W2", "d", ("A2",))], [])
    assert idx.authors_by_doi["d"] == {"A1", "A2"}

    idx = build_doi_index([], [TweetEvent("e", "T1", "e")])
    assert "e" in idx.tweeters_by_doi and "e" not in idx.authors_by_doi


@given(st.lists(st.tuples(st.sampled_from("abcde"), st.lists(st.sampled_from(["A1", "A2", "A3", "A4"]),
                                                              min_size=1, max_size=4)), max_size=40))
def test_index_matches_brute_force(works_spec):
    works = [WorkRecord(f"W{i}", d, tuple(ids)) for i, (d, ids) in enumerate(works_spec)]
    idx = build_doi_index(works, [])
    for d in "abcde":
        distinct = {a for w in works if w.doi == d for a in w.author_ids}
        assert len(idx.authors_by_doi.get(d, set())) == len(distinct)


def test_round_trip(tmp_path):
    synth = generate_synthetic_corpus(5, SynthParams(n_authors=60, n_planted=15, n_distractors=10))
    paths = write_corpus(synth.corpus, tmp_path)
    loaded = load_corpus(paths)
    c = synth.corpus
    assert loaded.authors == c.authors
    assert loaded.works == c.works
    assert loaded.events == c.events
    assert loaded.tweeters == c.tweeters
    assert loaded.golden == c.golden


def test_tiny_fixture_loads(tiny_dir):
    paths = CorpusPaths(*(tiny_dir / n for n in
                          ("authors.csv", "works.jsonl", "events.csv", "tweeters.csv", "golden.csv")))
    corpus = load_corpus(paths, workers=3)
    assert list(corpus.report.files) == ["authors", "works", "events", "tweeters", "golden"]
    assert corpus.authors["A3"].country == "ES"
    assert {w.doi for w in corpus.works} == {"10.1000/abc", "10.1000/def", "10.1000/ghi", "10.1000/jkl"}
    assert corpus.report.files["events"].malformed == {"missing or invalid doi": 1}

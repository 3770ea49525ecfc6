"""Input datasets: loading, validation, export, and the DOI block index."""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

MALFORMED_LIMIT = 0.10

AUTHORS_HEADER = ["author_id", "display_name", "orcid", "country"]
EVENTS_HEADER = ["tweet_id", "tweeter_id", "doi"]
TWEETERS_HEADER = ["tweeter_id", "handle", "profile_name"]
GOLDEN_HEADER = ["author_id", "tweeter_id"]

_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi:",
)
_COUNTRY_RE = re.compile(r"^[A-Za-z]{2}$")


class CorpusError(Exception):
    """Base class for input problems."""


class FileMissing(CorpusError, FileNotFoundError):
    pass


class FormatError(CorpusError):
    pass


class ExcessiveMalformedRows(CorpusError):
    pass


class InvalidDoi(ValueError):
    pass


class _BadRow(ValueError):
    """Row-level validation failure; message is the skip reason."""


@dataclass(frozen=True, slots=True)
class AuthorRecord:
    author_id: str
    display_name: str
    orcid: str | None = None
    country: str | None = None


@dataclass(frozen=True, slots=True)
class ConceptScore:
    concept_name: str
    level: int
    score: float


@dataclass(frozen=True, slots=True)
class WorkRecord:
    work_id: str
    doi: str
    author_ids: tuple[str, ...]
    concepts: tuple[ConceptScore, ...] = ()


@dataclass(frozen=True, slots=True)
class TweetEvent:
    tweet_id: str
    tweeter_id: str
    doi: str


@dataclass(frozen=True, slots=True)
class TweeterProfile:
    tweeter_id: str
    handle: str
    profile_name: str


@dataclass(frozen=True, slots=True, order=True)
class GoldenPair:
    author_id: str
    tweeter_id: str


@dataclass
class DoiIndex:
    authors_by_doi: dict[str, set[str]] = field(default_factory=dict)
    tweeters_by_doi: dict[str, set[str]] = field(default_factory=dict)


@dataclass
class FileReport:
    path: str
    rows_read: int = 0
    rows_loaded: int = 0
    malformed: Counter = field(default_factory=Counter)
    duplicates: int = 0

    @property
    def malformed_count(self) -> int:
        return sum(self.malformed.values())

    def as_dict(self) -> dict:
        return {
            "path": self.path,
            "rows_read": self.rows_read,
            "rows_loaded": self.rows_loaded,
            "duplicates": self.duplicates,
            "malformed": dict(sorted(self.malformed.items())),
        }


@dataclass
class LoadReport:
    files: dict[str, FileReport] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {name: rep.as_dict() for name, rep in self.files.items()}

    def render(self) -> str:
        lines = ["dataset    read      loaded    duplicates  malformed"]
        for name, rep in self.files.items():
            lines.append(
                f"{name:<10} {rep.rows_read:<9} {rep.rows_loaded:<9} "
                f"{rep.duplicates:<11} {rep.malformed_count}"
            )
            for reason, n in sorted(rep.malformed.items()):
                lines.append(f"    skipped {n} row(s): {reason}")
        return "\n".join(lines)

    def write(self, out_dir: Path) -> None:
        out_dir = Path(out_dir)
        (out_dir / "load_report.txt").write_text(self.render() + "\n", encoding="utf-8")
        (out_dir / "load_report.json").write_text(
            json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


@dataclass
class CorpusPaths:
    authors: Path
    works: Path
    events: Path
    tweeters: Path
    golden: Path | None = None


@dataclass
class Corpus:
    authors: dict[str, AuthorRecord]
    works: list[WorkRecord]
    events: list[TweetEvent]
    tweeters: dict[str, TweeterProfile]
    golden: list[GoldenPair]
    report: LoadReport = field(default_factory=LoadReport)

    def golden_set(self) -> set[tuple[str, str]]:
        return {(g.author_id, g.tweeter_id) for g in self.golden}


def normalize_doi(raw: str) -> str:
    """Lowercase a DOI and strip URL / ``doi:`` prefixes.

    >>> normalize_doi("https://doi.org/10.1000/ABC")
    '10.1000/abc'
    """
    doi = (raw or "").strip().lower()
    for prefix in _DOI_PREFIXES:
        if doi.startswith(prefix):
            doi = doi[len(prefix):].strip()
            break
    if not doi.startswith("10."):
        raise InvalidDoi(f"not a DOI: {raw!r}")
    return doi


def build_doi_index(works: Iterable[WorkRecord], events: Iterable[TweetEvent]) -> DoiIndex:
    index = DoiIndex()
    for work in works:
        index.authors_by_doi.setdefault(work.doi, set()).update(work.author_ids)
    for event in events:
        index.tweeters_by_doi.setdefault(event.doi, set()).add(event.tweeter_id)
    return index


# -- loading ---------------------------------------------------------------


def _require(path: Path | str | None) -> Path:
    if path is None:
        raise FileMissing("no path given")
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"{path}: no such file")
    return path


def _check_malformed(rep: FileReport) -> None:
    if rep.rows_read and rep.malformed_count / rep.rows_read > MALFORMED_LIMIT:
        raise ExcessiveMalformedRows(
            f"{rep.path}: {rep.malformed_count} of {rep.rows_read} rows malformed "
            f"(limit {MALFORMED_LIMIT:.0%})"
        )


def _csv_rows(path: Path, header: list[str], rep: FileReport) -> Iterator[dict[str, str] | None]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        found = next(reader, None)
        if found is None or [h.strip() for h in found] != header:
            raise FormatError(f"{path}: expected header {','.join(header)}, got {found!r}")
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            rep.rows_read += 1
            if len(row) != len(header):
                rep.malformed[f"expected {len(header)} fields"] += 1
                yield None
                continue
            yield dict(zip(header, row))


def _need(row: dict, key: str) -> str:
    value = row[key].strip()
    if not value:
        raise _BadRow(f"missing {key}")
    return value


def _load_table(
    path: Path,
    header: list[str],
    name: str,
    parse: Callable[[dict[str, str]], object],
    key: Callable[[object], object] | None,
    report: LoadReport,
) -> list:
    rep = FileReport(str(path))
    report.files[name] = rep
    seen: set = set()
    out = []
    for row in _csv_rows(path, header, rep):
        if row is None:
            continue
        try:
            rec = parse(row)
        except _BadRow as exc:
            rep.malformed[str(exc)] += 1
            continue
        if key is not None:
            k = key(rec)
            if k in seen:
                rep.duplicates += 1
                continue
            seen.add(k)
        out.append(rec)
    rep.rows_loaded = len(out)
    _check_malformed(rep)
    return out


def _parse_author(row: dict[str, str]) -> AuthorRecord:
    country = row["country"].strip() or None
    if country is not None:
        if not _COUNTRY_RE.match(country):
            raise _BadRow("invalid country code")
        country = country.upper()
    return AuthorRecord(
        author_id=_need(row, "author_id"),
        display_name=row["display_name"].strip(),
        orcid=row["orcid"].strip() or None,
        country=country,
    )


def _parse_doi(raw: str) -> str:
    try:
        return normalize_doi(raw)
    except InvalidDoi:
        raise _BadRow("missing or invalid doi") from None


def _parse_event(row: dict[str, str]) -> TweetEvent:
    return TweetEvent(
        tweet_id=_need(row, "tweet_id"),
        tweeter_id=_need(row, "tweeter_id"),
        doi=_parse_doi(row["doi"]),
    )


def _parse_tweeter(row: dict[str, str]) -> TweeterProfile:
    return TweeterProfile(
        tweeter_id=_need(row, "tweeter_id"),
        handle=_need(row, "handle"),
        profile_name=row["profile_name"].strip(),
    )


def _parse_golden(row: dict[str, str]) -> GoldenPair:
    return GoldenPair(_need(row, "author_id"), _need(row, "tweeter_id"))


def _parse_work(line: str) -> WorkRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        raise _BadRow("invalid JSON") from None
    if not isinstance(obj, dict):
        raise _BadRow("record is not an object")
    work_id = str(obj.get("work_id") or "").strip()
    if not work_id:
        raise _BadRow("missing work_id")
    doi = _parse_doi(str(obj.get("doi") or ""))
    raw_ids = obj.get("author_ids")
    if not isinstance(raw_ids, list):
        raise _BadRow("author_ids is not a list")
    author_ids = tuple(dict.fromkeys(str(a).strip() for a in raw_ids if str(a).strip()))
    if not author_ids:
        raise _BadRow("no author_ids")
    concepts = []
    for c in obj.get("concepts") or []:
        try:
            concept = ConceptScore(str(c["name"]), int(c["level"]), float(c["score"]))
        except (KeyError, TypeError, ValueError):
            raise _BadRow("malformed concept") from None
        if not concept.concept_name or concept.level < 0 or not 0.0 <= concept.score <= 1.0:
            raise _BadRow("concept out of range")
        concepts.append(concept)
    return WorkRecord(work_id, doi, author_ids, tuple(concepts))


def load_works(path: Path | str, report: LoadReport | None = None) -> list[WorkRecord]:
    path = _require(path)
    report = report if report is not None else LoadReport()
    rep = FileReport(str(path))
    report.files["works"] = rep
    seen: set[str] = set()
    works = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rep.rows_read += 1
            try:
                work = _parse_work(line)
            except _BadRow as exc:
                rep.malformed[str(exc)] += 1
                continue
            if work.work_id in seen:
                rep.duplicates += 1
                continue
            seen.add(work.work_id)
            works.append(work)
    rep.rows_loaded = len(works)
    _check_malformed(rep)
    return works


def load_authors(path, report: LoadReport | None = None) -> dict[str, AuthorRecord]:
    report = report if report is not None else LoadReport()
    rows = _load_table(_require(path), AUTHORS_HEADER, "authors", _parse_author,
                       lambda r: r.author_id, report)
    return {r.author_id: r for r in rows}


def load_events(path, report: LoadReport | None = None) -> list[TweetEvent]:
    report = report if report is not None else LoadReport()
    # repeated (tweet, tweeter, doi) rows carry no information
    return _load_table(_require(path), EVENTS_HEADER, "events", _parse_event,
                       lambda r: r, report)


def load_tweeters(path, report: LoadReport | None = None) -> dict[str, TweeterProfile]:
    report = report if report is not None else LoadReport()
    rows = _load_table(_require(path), TWEETERS_HEADER, "tweeters", _parse_tweeter,
                       lambda r: r.tweeter_id, report)
    return {r.tweeter_id: r for r in rows}


def load_golden(path, report: LoadReport | None = None) -> list[GoldenPair]:
    report = report if report is not None else LoadReport()
    return _load_table(_require(path), GOLDEN_HEADER, "golden", _parse_golden,
                       lambda r: r, report)


def load_corpus(paths: CorpusPaths, workers: int = 1) -> Corpus:
    """Load all input files. Golden pairs are optional."""
    report = LoadReport()
    # fixed insertion order keeps the report stable whatever the worker count
    for name in ("authors", "works", "events", "tweeters", "golden"):
        report.files[name] = FileReport("")
    jobs = {
        "authors": lambda: load_authors(paths.authors, report),
        "works": lambda: load_works(paths.works, report),
        "events": lambda: load_events(paths.events, report),
        "tweeters": lambda: load_tweeters(paths.tweeters, report),
    }
    if paths.golden is not None:
        jobs["golden"] = lambda: load_golden(paths.golden, report)
    else:
        del report.files["golden"]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            futures = {name: pool.submit(job) for name, job in jobs.items()}
            results = {name: f.result() for name, f in futures.items()}
    else:
        results = {name: job() for name, job in jobs.items()}
    return Corpus(
        authors=results["authors"],
        works=results["works"],
        events=results["events"],
        tweeters=results["tweeters"],
        golden=results.get("golden", []),
        report=report,
    )


# -- export ----------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_authors(path, authors: Iterable[AuthorRecord]) -> None:
    _write_csv(Path(path), AUTHORS_HEADER,
               ((a.author_id, a.display_name, a.orcid or "", a.country or "") for a in authors))


def write_events(path, events: Iterable[TweetEvent]) -> None:
    _write_csv(Path(path), EVENTS_HEADER, ((e.tweet_id, e.tweeter_id, e.doi) for e in events))


def write_tweeters(path, tweeters: Iterable[TweeterProfile]) -> None:
    _write_csv(Path(path), TWEETERS_HEADER,
               ((t.tweeter_id, t.handle, t.profile_name) for t in tweeters))


def write_golden(path, golden: Iterable[GoldenPair]) -> None:
    _write_csv(Path(path), GOLDEN_HEADER, ((g.author_id, g.tweeter_id) for g in golden))


def write_works(path, works: Iterable[WorkRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w in works:
            obj = {
                "work_id": w.work_id,
                "doi": w.doi,
                "author_ids": list(w.author_ids),
                "concepts": [
                    {"name": c.concept_name, "level": c.level, "score": c.score}
                    for c in w.concepts
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def write_corpus(corpus: Corpus, out_dir) -> CorpusPaths:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = CorpusPaths(
        authors=out_dir / "authors.csv",
        works=out_dir / "works.jsonl",
        events=out_dir / "events.csv",
        tweeters=out_dir / "tweeters.csv",
        golden=out_dir / "golden.csv",
    )
    write_authors(paths.authors, corpus.authors.values())
    write_works(paths.works, corpus.works)
    write_events(paths.events, corpus.events)
    write_tweeters(paths.tweeters, corpus.tweeters.values())
    write_golden(paths.golden, corpus.golden)
    return paths


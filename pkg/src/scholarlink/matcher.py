"""DOI-blocked candidate generation and the hierarchical name-matching steps.

Matching runs in two layers.  ``step_matches`` applies a step's rule to one
author/tweeter pair directly and returns the witness.  ``run_hierarchy``
never loops over pairs for the yes/no decision: for each step every entity
gets a small set of equality keys (e.g. ``initials + last name``), and a pair
matches when its two key sets intersect.  The direct rule is then used only
to produce witnesses for pairs already known to match, which doubles as a
consistency check between the two layers.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import AuthorRecord, DoiIndex, TweeterProfile
from .namekit import (
    EmptyNameError,
    NameVariant,
    NormalizedName,
    concat_full,
    expand_variants,
    normalize_handle,
    normalize_name,
)

log = logging.getLogger(__name__)

MATCHES_HEADER = [
    "author_id", "tweeter_id", "step_id", "criteria", "field",
    "matched_author_variant", "matched_tweeter_value",
]


class Criteria(str, Enum):
    FULL_NAME_EXACT = "FullNameExact"
    FULL_NAME_SUBSTRING = "FullNameSubstring"
    LAST_NAME_INITIALS = "LastNameInitials"
    LAST_NAME_FIRST_TOKEN = "LastNameFirstToken"
    LAST_NAME_FIRST_INITIAL = "LastNameFirstInitial"


class Field(str, Enum):
    HANDLE = "Handle"
    PROFILE_NAME = "ProfileName"


_CRITERIA_LABELS = {
    Criteria.FULL_NAME_EXACT: "Full name exact match",
    Criteria.FULL_NAME_SUBSTRING: "Full name substring",
    Criteria.LAST_NAME_INITIALS: "Last name + initials",
    Criteria.LAST_NAME_FIRST_TOKEN: "Last name + first token",
    Criteria.LAST_NAME_FIRST_INITIAL: "Last name + first initial",
}
_FIELD_LABELS = {Field.HANDLE: "Handle", Field.PROFILE_NAME: "Profile name"}


@dataclass(frozen=True, slots=True)
class MatchStep:
    step_id: int
    criteria: Criteria
    field: Field

    @property
    def criteria_label(self) -> str:
        return _CRITERIA_LABELS[self.criteria]

    @property
    def field_label(self) -> str:
        return _FIELD_LABELS[self.field]

    def __str__(self) -> str:
        return f"{self.step_id} {self.criteria.value}/{self.field.value}"


STEPS: tuple[MatchStep, ...] = (
    MatchStep(1, Criteria.LAST_NAME_FIRST_TOKEN, Field.HANDLE),
    MatchStep(2, Criteria.FULL_NAME_EXACT, Field.HANDLE),
    MatchStep(3, Criteria.LAST_NAME_INITIALS, Field.HANDLE),
    MatchStep(4, Criteria.LAST_NAME_FIRST_INITIAL, Field.HANDLE),
    MatchStep(5, Criteria.FULL_NAME_EXACT, Field.PROFILE_NAME),
    MatchStep(6, Criteria.LAST_NAME_FIRST_TOKEN, Field.PROFILE_NAME),
    MatchStep(7, Criteria.FULL_NAME_SUBSTRING, Field.PROFILE_NAME),
    MatchStep(8, Criteria.LAST_NAME_INITIALS, Field.PROFILE_NAME),
    MatchStep(9, Criteria.LAST_NAME_FIRST_INITIAL, Field.PROFILE_NAME),
)
STEPS_BY_ID = {s.step_id: s for s in STEPS}


def select_steps(enabled: Iterable[int] | None = None,
                 disabled: Iterable[int] = ()) -> tuple[MatchStep, ...]:
    """Enabled steps in canonical order. Order of *enabled* must already be canonical."""
    disabled = set(disabled)
    ids = list(enabled) if enabled is not None else [s.step_id for s in STEPS]
    unknown = [i for i in [*ids, *disabled] if i not in STEPS_BY_ID]
    if unknown:
        raise ValueError(f"unknown step id(s): {unknown}")
    if ids != sorted(set(ids)):
        raise ValueError(f"steps must be a subsequence of 1..9 without reordering: {ids}")
    return tuple(STEPS_BY_ID[i] for i in ids if i not in disabled)


# -- per-entity name forms ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class AuthorForms:
    author_id: str
    name: NormalizedName
    variants: tuple[NameVariant, ...]

    @property
    def full(self) -> str:
        return str(self.name)


@dataclass(frozen=True, slots=True)
class TweeterForms:
    tweeter_id: str
    name: NormalizedName | None
    variants: tuple[NameVariant, ...]
    handle: str

    @property
    def full(self) -> str:
        return str(self.name) if self.name is not None else ""


def author_forms(author: AuthorRecord, honorifics=None) -> AuthorForms | None:
    try:
        name = normalize_name(author.display_name, honorifics)
    except EmptyNameError:
        return None
    return AuthorForms(author.author_id, name, tuple(expand_variants(author.author_id, name)))


def tweeter_forms(profile: TweeterProfile, honorifics=None) -> TweeterForms:
    try:
        name = normalize_name(profile.profile_name, honorifics)
    except EmptyNameError:
        name = None
    variants = tuple(expand_variants(profile.tweeter_id, name)) if name is not None else ()
    return TweeterForms(profile.tweeter_id, name, variants, normalize_handle(profile.handle))


@dataclass
class NameTables:
    authors: dict[str, AuthorForms]
    tweeters: dict[str, TweeterForms]
    skips: Counter = field(default_factory=Counter)


def build_name_tables(
    authors: Iterable[AuthorRecord],
    tweeters: Iterable[TweeterProfile],
    honorifics=None,
) -> NameTables:
    skips: Counter = Counter()
    a_forms: dict[str, AuthorForms] = {}
    for rec in authors:
        if not rec.display_name.strip():
            skips["author: empty display name"] += 1
            continue
        forms = author_forms(rec, honorifics)
        if forms is None:
            skips["author: no name tokens after normalization"] += 1
            continue
        if not forms.variants:
            skips["author: single-token name, variant steps unusable"] += 1
        a_forms[rec.author_id] = forms
    t_forms: dict[str, TweeterForms] = {}
    for prof in tweeters:
        forms = tweeter_forms(prof, honorifics)
        if forms.name is None:
            skips["tweeter: profile name unusable"] += 1
        elif not forms.variants:
            skips["tweeter: single-token profile name, variant steps unusable"] += 1
        if not forms.handle:
            skips["tweeter: handle unusable"] += 1
        t_forms[prof.tweeter_id] = forms
    return NameTables(a_forms, t_forms, skips)


# -- direct rule application -------------------------------------------------

_VARIANT_KEY: dict[Criteria, Callable[[NameVariant], str]] = {
    Criteria.LAST_NAME_INITIALS: lambda v: v.initials,
    Criteria.LAST_NAME_FIRST_TOKEN: lambda v: v.first_token,
    Criteria.LAST_NAME_FIRST_INITIAL: lambda v: v.first_initial,
}


def contains_token_run(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    n = len(needle)
    if n == 0:
        return False
    return any(tuple(haystack[i:i + n]) == tuple(needle) for i in range(len(haystack) - n + 1))


def step_matches(step: MatchStep, author: AuthorForms | None,
                 tweeter: TweeterForms | None) -> tuple[str, str] | None:
    """Apply one step's rule to a pair.

    Returns ``(matched_author_variant, matched_tweeter_value)`` for the first
    matching combination (author variants outer, tweeter forms inner, both in
    split order), or None.
    """
    if author is None or tweeter is None:
        return None
    crit = step.criteria
    if step.field is Field.HANDLE:
        handle = tweeter.handle
        if not handle:
            return None
        if crit is Criteria.FULL_NAME_EXACT:
            return (author.full, handle) if concat_full(author.name) == handle else None
        if crit is Criteria.FULL_NAME_SUBSTRING:
            return None
        key = _VARIANT_KEY[crit]
        for av in author.variants:
            if key(av) + av.last_concat == handle:
                return f"{key(av)} {av.last_name}", handle
        return None

    if tweeter.name is None:
        return None
    if crit is Criteria.FULL_NAME_EXACT:
        return (author.full, tweeter.full) if author.full == tweeter.full else None
    if crit is Criteria.FULL_NAME_SUBSTRING:
        if contains_token_run(tweeter.name.tokens, author.name.tokens):
            return author.full, tweeter.full
        return None
    key = _VARIANT_KEY[crit]
    for av in author.variants:
        for tv in tweeter.variants:
            if av.last_name == tv.last_name and key(av) == key(tv):
                return f"{key(av)} {av.last_name}", f"{key(tv)} {tv.last_name}"
    return None


# -- equality keys -------------------------------------------------------------

_SEP = "\x1f"


def author_keys(step: MatchStep, author: AuthorForms | None) -> set[str]:
    if author is None:
        return set()
    crit = step.criteria
    if step.field is Field.HANDLE:
        if crit is Criteria.FULL_NAME_EXACT:
            return {concat_full(author.name)}
        if crit is Criteria.FULL_NAME_SUBSTRING:
            return set()
        key = _VARIANT_KEY[crit]
        return {key(v) + v.last_concat for v in author.variants}
    if crit in (Criteria.FULL_NAME_EXACT, Criteria.FULL_NAME_SUBSTRING):
        return {author.full}
    key = _VARIANT_KEY[crit]
    return {key(v) + _SEP + v.last_name for v in author.variants}


def tweeter_keys(step: MatchStep, tweeter: TweeterForms | None) -> set[str]:
    if tweeter is None:
        return set()
    crit = step.criteria
    if step.field is Field.HANDLE:
        if crit is Criteria.FULL_NAME_SUBSTRING or not tweeter.handle:
            return set()
        return {tweeter.handle}
    if tweeter.name is None:
        return set()
    if crit is Criteria.FULL_NAME_EXACT:
        return {tweeter.full}
    if crit is Criteria.FULL_NAME_SUBSTRING:
        toks = tweeter.name.tokens
        return {" ".join(toks[i:j]) for i in range(len(toks)) for j in range(i + 1, len(toks) + 1)}
    key = _VARIANT_KEY[crit]
    return {key(v) + _SEP + v.last_name for v in tweeter.variants}


def _csr(key_sets: list[set[str]], vocab: dict[str, int]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(key_sets) + 1, dtype=np.int64)
    flat: list[int] = []
    for i, keys in enumerate(key_sets):
        flat.extend(vocab.setdefault(k, len(vocab)) for k in keys)
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat, dtype=np.int64)


def _expand(ids: np.ndarray, ptr: np.ndarray, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ragged gather: (row, key) for every key of every row's entity."""
    lengths = ptr[ids + 1] - ptr[ids]
    total = int(lengths.sum())
    rows = np.repeat(np.arange(len(ids), dtype=np.int64), lengths)
    if total == 0:
        return rows, keys[:0]
    within = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return rows, keys[np.repeat(ptr[ids], lengths) + within]


def _match_chunk(ca, ct, a_ptr, a_keys, t_ptr, t_keys, n_vocab) -> np.ndarray:
    row_a, key_a = _expand(ca, a_ptr, a_keys)
    row_t, key_t = _expand(ct, t_ptr, t_keys)
    mask = np.zeros(len(ca), dtype=bool)
    if len(key_a) == 0 or len(key_t) == 0:
        return mask
    code_a = row_a * n_vocab + key_a
    code_t = row_t * n_vocab + key_t
    hit = np.isin(code_a, code_t, assume_unique=True)
    mask[row_a[hit]] = True
    return mask


# -- candidates ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CandidatePair:
    author_id: str
    tweeter_id: str
    shared_dois: frozenset[str]


def generate_candidates(index: DoiIndex) -> list[CandidatePair]:
    """Cross product of authors and tweeters per DOI, merged across DOIs."""
    shared: dict[tuple[str, str], set[str]] = {}
    for doi, tweeters in index.tweeters_by_doi.items():
        authors = index.authors_by_doi.get(doi)
        if not authors:
            continue
        for a in authors:
            for t in tweeters:
                shared.setdefault((a, t), set()).add(doi)
    return [CandidatePair(a, t, frozenset(d)) for (a, t), d in sorted(shared.items())]


@dataclass
class CandidateSet:
    """Candidate pairs as parallel index arrays, sorted by (author_id, tweeter_id)."""

    author_ids: list[str]
    tweeter_ids: list[str]
    a: np.ndarray
    t: np.ndarray

    def __len__(self) -> int:
        return len(self.a)

    def pair(self, i: int) -> tuple[str, str]:
        return self.author_ids[self.a[i]], self.tweeter_ids[self.t[i]]

    def pairs(self) -> list[tuple[str, str]]:
        aid, tid = self.author_ids, self.tweeter_ids
        return [(aid[a], tid[t]) for a, t in zip(self.a.tolist(), self.t.tolist())]

    @classmethod
    def _from_codes(cls, author_ids, tweeter_ids, codes: np.ndarray) -> "CandidateSet":
        codes = np.unique(codes)
        nt = max(len(tweeter_ids), 1)
        return cls(author_ids, tweeter_ids, codes // nt, codes % nt)

    @classmethod
    def from_index(cls, index: DoiIndex) -> "CandidateSet":
        shared = [d for d in index.tweeters_by_doi if d in index.authors_by_doi]
        author_ids = sorted({a for d in shared for a in index.authors_by_doi[d]})
        tweeter_ids = sorted({t for d in shared for t in index.tweeters_by_doi[d]})
        a_pos = {a: i for i, a in enumerate(author_ids)}
        t_pos = {t: i for i, t in enumerate(tweeter_ids)}
        nt = max(len(tweeter_ids), 1)
        codes: list[int] = []
        for d in shared:
            ts = [t_pos[t] for t in index.tweeters_by_doi[d]]
            for a in index.authors_by_doi[d]:
                base = a_pos[a] * nt
                codes.extend(base + t for t in ts)
        return cls._from_codes(author_ids, tweeter_ids, np.asarray(codes, dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "CandidateSet":
        tuples = [
            (p.author_id, p.tweeter_id) if isinstance(p, CandidatePair) else tuple(p)
            for p in pairs
        ]
        author_ids = sorted({a for a, _ in tuples})
        tweeter_ids = sorted({t for _, t in tuples})
        a_pos = {a: i for i, a in enumerate(author_ids)}
        t_pos = {t: i for i, t in enumerate(tweeter_ids)}
        nt = max(len(tweeter_ids), 1)
        codes = np.asarray([a_pos[a] * nt + t_pos[t] for a, t in tuples], dtype=np.int64)
        return cls._from_codes(author_ids, tweeter_ids, codes)


# -- outcome ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MatchedPair:
    author_id: str
    tweeter_id: str
    step: MatchStep
    matched_author_variant: str
    matched_tweeter_value: str

    @property
    def key(self) -> tuple[str, str]:
        return self.author_id, self.tweeter_id

    def sort_key(self) -> tuple[int, str, str]:
        return self.step.step_id, self.author_id, self.tweeter_id


@dataclass(frozen=True, slots=True)
class StepCounts:
    authors: int
    tweeters: int
    pairs: int


def count_pairs(pairs: Iterable) -> StepCounts:
    keys = {p.key if isinstance(p, MatchedPair) else tuple(p) for p in pairs}
    return StepCounts(len({a for a, _ in keys}), len({t for _, t in keys}), len(keys))


class AccountingError(RuntimeError):
    """The per-step partition / cumulative invariants do not hold."""


@dataclass
class MatchOutcome:
    steps: tuple[MatchStep, ...]
    new_pairs_by_step: dict[int, frozenset[MatchedPair]]
    cumulative_by_step: dict[int, StepCounts]
    combined: frozenset[MatchedPair]
    # pairs each step matches on its own, hierarchy ignored
    independent_by_step: dict[int, frozenset[tuple[str, str]]]
    n_candidates: int = 0

    def sorted_matches(self) -> list[MatchedPair]:
        return sorted(self.combined, key=MatchedPair.sort_key)

    def combined_keys(self) -> set[tuple[str, str]]:
        return {p.key for p in self.combined}

    def assignments(self) -> dict[tuple[str, str], int]:
        return {p.key: p.step.step_id for p in self.combined}


def assemble_outcome(
    steps: Sequence[MatchStep],
    matched: Iterable[MatchedPair],
    independent: Mapping[int, Iterable[tuple[str, str]]],
    n_candidates: int = 0,
) -> MatchOutcome:
    by_step: dict[int, set[MatchedPair]] = {s.step_id: set() for s in steps}
    for m in matched:
        by_step[m.step.step_id].add(m)
    new_pairs = {sid: frozenset(ps) for sid, ps in by_step.items()}
    cumulative: dict[int, StepCounts] = {}
    running: set[tuple[str, str]] = set()
    for s in steps:
        running.update(p.key for p in new_pairs[s.step_id])
        cumulative[s.step_id] = count_pairs(running)
    combined = frozenset().union(*new_pairs.values()) if new_pairs else frozenset()
    outcome = MatchOutcome(
        steps=tuple(steps),
        new_pairs_by_step=new_pairs,
        cumulative_by_step=cumulative,
        combined=combined,
        independent_by_step={s.step_id: frozenset(independent.get(s.step_id, ()))
                             for s in steps},
        n_candidates=n_candidates,
    )
    verify_accounting(outcome)
    return outcome


def verify_accounting(outcome: MatchOutcome) -> None:
    seen: set[tuple[str, str]] = set()
    total = 0
    for sid, pairs in outcome.new_pairs_by_step.items():
        keys = {p.key for p in pairs}
        if len(keys) != len(pairs):
            raise AccountingError(f"step {sid}: a pair is recorded twice")
        if keys & seen:
            raise AccountingError(f"step {sid}: overlaps an earlier step")
        seen |= keys
        total += len(pairs)
    if seen != outcome.combined_keys() or total != len(outcome.combined):
        raise AccountingError("combined set is not the union of the per-step sets")
    prev = -1
    for sid, counts in outcome.cumulative_by_step.items():
        if counts.pairs < prev:
            raise AccountingError(f"cumulative pair count decreases at step {sid}")
        prev = counts.pairs
    if outcome.cumulative_by_step:
        last = list(outcome.cumulative_by_step.values())[-1]
        if last != count_pairs(outcome.combined):
            raise AccountingError("final cumulative row differs from the combined counts")


# -- hierarchy ----------------------------------------------------------------


def _step_mask(step, cands: CandidateSet, tables: NameTables, workers: int) -> np.ndarray:
    vocab: dict[str, int] = {}
    a_ptr, a_keys = _csr([author_keys(step, tables.authors.get(a)) for a in cands.author_ids], vocab)
    t_ptr, t_keys = _csr([tweeter_keys(step, tables.tweeters.get(t)) for t in cands.tweeter_ids], vocab)
    n_vocab = max(len(vocab), 1)
    n = len(cands)
    if workers <= 1 or n < 2 * workers:
        return _match_chunk(cands.a, cands.t, a_ptr, a_keys, t_ptr, t_keys, n_vocab)
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(
            lambda lo_hi: _match_chunk(cands.a[lo_hi[0]:lo_hi[1]], cands.t[lo_hi[0]:lo_hi[1]],
                                       a_ptr, a_keys, t_ptr, t_keys, n_vocab),
            list(zip(bounds[:-1], bounds[1:])),
        )
        return np.concatenate(list(parts))


def run_hierarchy(
    candidates: CandidateSet | Iterable,
    tables: NameTables,
    steps: Sequence[MatchStep] = STEPS,
    workers: int = 1,
) -> MatchOutcome:
    """Run the enabled steps in order; each pair keeps the first step that matches it."""
    cands = candidates if isinstance(candidates, CandidateSet) else CandidateSet.from_pairs(candidates)
    n = len(cands)
    assigned = np.zeros(n, dtype=np.int16)
    independent: dict[int, list[tuple[str, str]]] = {}
    matched: list[MatchedPair] = []
    for step in steps:
        mask = _step_mask(step, cands, tables, workers)
        rows = np.flatnonzero(mask)
        independent[step.step_id] = [cands.pair(i) for i in rows.tolist()]
        fresh = rows[assigned[rows] == 0]
        assigned[fresh] = step.step_id
        for i in fresh.tolist():
            a, t = cands.pair(i)
            witness = step_matches(step, tables.authors.get(a), tables.tweeters.get(t))
            if witness is None:
                raise AccountingError(f"key join and direct rule disagree on {(a, t)} at {step}")
            matched.append(MatchedPair(a, t, step, *witness))
        log.info("step %s: %d independent, %d new", step, len(rows), len(fresh))
    return assemble_outcome(steps, matched, independent, n_candidates=n)


def write_matches(path, outcome: MatchOutcome) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MATCHES_HEADER)
        for m in outcome.sorted_matches():
            writer.writerow([
                m.author_id, m.tweeter_id, m.step.step_id, m.step.criteria.value,
                m.step.field.value, m.matched_author_variant, m.matched_tweeter_value,
            ])


def read_matches(path) -> list[dict[str, str]]:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))

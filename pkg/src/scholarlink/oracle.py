"""Brute-force reference matcher used to check ``run_hierarchy``.

Nothing here is indexed: candidate pairs come from comparing every author's
DOIs with every tweeter's DOIs, and every candidate is pushed through
``step_matches`` step by step.
"""

from __future__ import annotations

from .corpus import Corpus
from .matcher import (
    STEPS,
    MatchedPair,
    MatchOutcome,
    MatchStep,
    assemble_outcome,
    author_forms,
    step_matches,
    tweeter_forms,
)

MAX_ENTITIES = 1000


class CorpusTooLarge(ValueError):
    pass


def brute_force_candidates(corpus: Corpus) -> list[tuple[str, str]]:
    author_dois: dict[str, set[str]] = {}
    for work in corpus.works:
        for a in work.author_ids:
            author_dois.setdefault(a, set()).add(work.doi)
    tweeter_dois: dict[str, set[str]] = {}
    for event in corpus.events:
        tweeter_dois.setdefault(event.tweeter_id, set()).add(event.doi)
    return [
        (a, t)
        for a in sorted(author_dois)
        for t in sorted(tweeter_dois)
        if author_dois[a] & tweeter_dois[t]
    ]


def brute_force_match(
    corpus: Corpus, steps: tuple[MatchStep, ...] = STEPS, honorifics=None
) -> MatchOutcome:
    if len(corpus.authors) > MAX_ENTITIES or len(corpus.tweeters) > MAX_ENTITIES:
        raise CorpusTooLarge(
            f"{len(corpus.authors)} authors / {len(corpus.tweeters)} tweeters; "
            f"limit is {MAX_ENTITIES} each"
        )
    candidates = brute_force_candidates(corpus)
    authors = {a: author_forms(rec, honorifics) for a, rec in corpus.authors.items()}
    tweeters = {t: tweeter_forms(rec, honorifics) for t, rec in corpus.tweeters.items()}

    matched = []
    for a, t in candidates:
        for step in steps:
            witness = step_matches(step, authors.get(a), tweeters.get(t))
            if witness is not None:
                matched.append(MatchedPair(a, t, step, *witness))
                break
    independent = {
        step.step_id: [
            (a, t) for a, t in candidates
            if step_matches(step, authors.get(a), tweeters.get(t)) is not None
        ]
        for step in steps
    }
    return assemble_outcome(steps, matched, independent, n_candidates=len(candidates))


def compare_outcomes(fast: MatchOutcome, slow: MatchOutcome) -> list[str]:
    """Differences between two outcomes; empty when they agree exactly."""
    problems = []
    if fast.combined != slow.combined:
        only_fast = sorted(fast.combined_keys() - slow.combined_keys())
        only_slow = sorted(slow.combined_keys() - fast.combined_keys())
        if only_fast or only_slow:
            problems.append(f"pair sets differ: +{only_fast[:5]} -{only_slow[:5]}")
        fa, sa = fast.assignments(), slow.assignments()
        moved = sorted(k for k in fa.keys() & sa.keys() if fa[k] != sa[k])
        if moved:
            problems.append(f"step assignment differs for {moved[:5]}")
        if not problems:
            problems.append("witnesses differ")
    for sid in slow.independent_by_step:
        if fast.independent_by_step.get(sid) != slow.independent_by_step[sid]:
            problems.append(f"independent matches differ at step {sid}")
    if fast.cumulative_by_step != slow.cumulative_by_step:
        problems.append("cumulative counts differ")
    return problems

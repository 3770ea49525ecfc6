"""Link scholarly author records to social-media accounts through self-tweeted DOIs."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    AuthorRecord,
    Corpus,
    CorpusPaths,
    GoldenPair,
    TweetEvent,
    TweeterProfile,
    WorkRecord,
    build_doi_index,
    load_corpus,
    normalize_doi,
)
from .evaluator import EvalReport, evaluate, evaluate_per_step, f_score  # noqa: E402
from .matcher import (  # noqa: E402
    STEPS,
    CandidateSet,
    MatchedPair,
    MatchOutcome,
    MatchStep,
    build_name_tables,
    generate_candidates,
    run_hierarchy,
    step_matches,
)
from .namekit import concat_full, expand_variants, normalize_handle, normalize_name  # noqa: E402

__all__ = [
    "AuthorRecord", "Corpus", "CorpusPaths", "GoldenPair", "TweetEvent", "TweeterProfile",
    "WorkRecord", "build_doi_index", "load_corpus", "normalize_doi",
    "EvalReport", "evaluate", "evaluate_per_step", "f_score",
    "STEPS", "CandidateSet", "MatchedPair", "MatchOutcome", "MatchStep",
    "build_name_tables", "generate_candidates", "run_hierarchy", "step_matches",
    "concat_full", "expand_variants", "normalize_handle", "normalize_name",
]

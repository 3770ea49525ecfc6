"""Personal-name normalization and first/last split variants.

Both sides of the linkage (author display names and tweeter profile names)
go through the same pipeline: fold to ASCII where possible, lowercase, drop
everything that is not a letter, strip honorifics, then enumerate every
first/last split of the remaining tokens.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_HONORIFICS: frozenset[str] = frozenset(
    {
        "dr", "prof", "professor", "phd", "md", "msc", "bsc",
        "mr", "mrs", "ms", "sir", "jr", "sr", "ii", "iii",
    }
)

# Characters turned into a token break before the letter filter runs.
_HYPHENS = "-‐‑‒–—−﹣－"
# Characters deleted outright so "O'Brien" stays one token.
_APOSTROPHES = "'’‘ʼʹ`´＇"

_TRANSLATE = {ord(c): " " for c in _HYPHENS}
_TRANSLATE.update({ord(c): None for c in _APOSTROPHES})


class EmptyNameError(ValueError):
    """Raised when nothing usable is left of a name after normalization."""


@dataclass(frozen=True, slots=True)
class NormalizedName:
    tokens: tuple[str, ...]

    def __str__(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, slots=True)
class NameVariant:
    """One first/last decomposition of a normalized name."""

    owner_id: str
    first_name: str
    last_name: str
    initials: str
    first_initial: str
    first_token: str

    @property
    def last_concat(self) -> str:
        return self.last_name.replace(" ", "")


def fold(text: str) -> str:
    """Compatibility-decompose and drop combining marks ("José" -> "Jose")."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def normalize_name(
    raw: str, honorifics: Iterable[str] | None = None
) -> NormalizedName:
    """Normalize a raw personal name into lowercase letter-only tokens.

    Raises EmptyNameError when no tokens survive.
    """
    stop = DEFAULT_HONORIFICS if honorifics is None else frozenset(honorifics)
    text = fold(raw or "").lower()
    text = text.translate(_TRANSLATE)
    # Lowercasing can reintroduce combining marks (e.g. dotted capital I);
    # isalpha() rejects them, so the filter below removes them too.
    kept = "".join(c if c.isalpha() else " " if c.isspace() else "" for c in text)
    tokens = tuple(t for t in kept.split() if t not in stop)
    if not tokens:
        raise EmptyNameError(f"no name tokens in {raw!r}")
    return NormalizedName(tokens)


def expand_variants(owner_id: str, name: NormalizedName | Sequence[str]) -> list[NameVariant]:
    """Return one variant per split point; single-token names give none."""
    tokens = name.tokens if isinstance(name, NormalizedName) else tuple(name)
    variants = []
    for i in range(1, len(tokens)):
        first = tokens[:i]
        initials = "".join(t[0] for t in first)
        variants.append(
            NameVariant(
                owner_id=owner_id,
                first_name=" ".join(first),
                last_name=" ".join(tokens[i:]),
                initials=initials,
                first_initial=initials[0],
                first_token=first[0],
            )
        )
    return variants


def concat_full(name: NormalizedName | Sequence[str]) -> str:
    tokens = name.tokens if isinstance(name, NormalizedName) else name
    return "".join(tokens)


def normalize_handle(raw: str) -> str:
    """Lowercase a handle and keep letters only; may return ''."""
    text = (raw or "").strip()
    if text.startswith("@"):
        text = text[1:]
    return "".join(c for c in text.lower() if c.isalpha())

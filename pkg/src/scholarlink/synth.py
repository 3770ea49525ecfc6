"""Seeded synthetic corpora with planted author/tweeter ground truth.

Every planted tweeter is rendered from one author's name according to one of
the nine step patterns and self-tweets at least one of that author's DOIs.
Distractors are either unique random names (never share a token with any
author) or homonyms that copy an author's surname and tweet one of the
author's papers.

Author surnames end in a token that no other name uses anywhere, so with
unique-random distractors the only way a pair can match is the planted one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import (
    AuthorRecord,
    ConceptScore,
    Corpus,
    GoldenPair,
    TweetEvent,
    TweeterProfile,
    WorkRecord,
)
from .namekit import fold

FIRST_NAMES = [
    "John", "William", "Mary", "Anna", "James", "Maria", "David", "Sarah", "Michael",
    "Laura", "Peter", "Emma", "Thomas", "Julia", "Daniel", "Elena", "Paul", "Sofia",
    "Mark", "Clara", "Robert", "Alice", "Richard", "Helen", "Joseph", "Nina", "Charles",
    "Eva", "George", "Olga", "Henry", "Ruth", "Frank", "Irene", "Martin", "Lucia",
    "José", "Zoë", "Chloé", "Björn", "François", "Müge", "Ingrid", "Rafael", "Ahmed",
    "Fatima", "Kenji", "Yuki", "Wei", "Priya", "Ravi", "Omar", "Leila", "Tomás",
    "Agnieszka", "Dmitri", "Kwame", "Amara", "Lars", "Sigrid",
]
REAL_SURNAMES = [
    "Smith", "Johnson", "Brown", "Garcia", "Miller", "Davis", "Rodriguez", "Wilson",
    "Anderson", "Taylor", "Moore", "Jackson", "Thompson", "White", "Harris",
    "Clark", "Lewis", "Walker", "Hall", "Young", "King", "Wright", "Lopez", "Hill",
    "Green", "Adams", "Baker", "Nelson", "Carter", "Mitchell", "Roberts", "Turner",
    "Phillips", "Campbell", "Parker", "Evans", "Edwards", "Collins", "Stewart",
    "Müller", "Schmidt", "Schneider", "Fischer", "Weber", "Meyer", "Wagner", "Becker",
    "Dubois", "Lefèvre", "Moreau", "Girard", "Rossi", "Russo", "Ferrari", "Esposito",
    "Bianchi", "Romano", "Núñez", "Peña", "Jiménez", "Muñoz", "Álvarez", "Suárez",
    "Kowalski", "Nowak", "Wiśniewski", "Novák", "Svoboda", "Horváth", "Nagy",
    "Tanaka", "Suzuki", "Takahashi", "Watanabe", "Nakamura", "Kobayashi", "Yamamoto",
    "Chen", "Wang", "Zhang", "Liu", "Yang", "Huang", "Zhao", "Kumar", "Singh", "Patel",
    "Sharma", "Gupta", "Okafor", "Mensah", "Andersson", "Johansson", "Karlsson",
    "Nielsen", "Hansen", "Jensen", "Virtanen", "Korhonen", "O'Brien", "O'Connor",
    "McCarthy", "MacDonald",
]
PARTICLES = ["van", "de", "von", "del", "da", "di", "van der", "de la"]
NOISE_WORDS = [
    "science", "lab", "news", "official", "research", "updates", "notes", "group",
    "views", "blog", "daily", "team", "talks", "world", "health", "tech",
]
DISCIPLINES = [
    "Medicine", "Biology", "Psychology", "Computer science", "Political science",
    "Chemistry", "Materials science", "Environmental science", "Business",
    "Sociology", "Geography", "Economics", "Geology", "Physics", "Art", "History",
    "Philosophy", "Mathematics", "Engineering",
]
SUBFIELDS = ["Genetics", "Machine learning", "Ecology", "Oncology", "Optics"]
COUNTRIES = ["US", "GB", "AU", "CA", "ES", "DE", "FR", "NL", "IN", "IT", "BR", "CH", "SE",
             "IE", "BE", "CN", "FI", "DK", "JP", "ZA", "MX", "NG"]
_SYLLABLES = [
    "ka", "lo", "ve", "ri", "tu", "zan", "mor", "pel", "qui", "shu", "dra", "xo", "bel",
    "nix", "tor", "gav", "yul", "fen", "oth", "wim", "jas", "cru", "hel", "vik", "zor",
    "pim", "dul", "rah", "sek", "lum", "bri", "gon", "tash", "vor", "kel", "ny", "mu",
]
# step classes that need two given names to be attributed to their own step
_NEEDS_TWO_GIVEN = {4, 6, 9}


class InvalidParams(ValueError):
    pass


@dataclass
class SynthParams:
    n_authors: int = 200
    n_planted: int = 45
    n_distractors: int = 50
    homonym_rate: float = 0.0
    works_per_author: tuple[int, int] = (1, 3)
    max_coauthors: int = 3
    n_events: int = 0  # pad with random events up to this many
    step_classes: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9)

    def validate(self) -> None:
        if self.n_authors <= 0:
            raise InvalidParams("n_authors must be positive")
        if not 0 <= self.n_planted <= self.n_authors:
            raise InvalidParams("n_planted must be between 0 and n_authors")
        if self.n_distractors < 0 or self.n_events < 0 or self.max_coauthors < 0:
            raise InvalidParams("counts must be non-negative")
        if not 0.0 <= self.homonym_rate <= 1.0:
            raise InvalidParams("homonym_rate must be in [0, 1]")
        lo, hi = self.works_per_author
        if not 1 <= lo <= hi:
            raise InvalidParams("works_per_author must satisfy 1 <= lo <= hi")
        if not self.step_classes or any(c not in range(1, 10) for c in self.step_classes):
            raise InvalidParams("step_classes must be drawn from 1..9")


@dataclass
class SyntheticCorpus:
    corpus: Corpus
    # planted (author_id, tweeter_id) -> intended step class
    truth: dict[tuple[str, str], int] = field(default_factory=dict)


class _TokenSupply:
    """Hands out lowercase-unique invented tokens never used before."""

    def __init__(self, rng: random.Random, reserved: set[str]):
        self.rng = rng
        self.used = set(reserved)

    def take(self) -> str:
        while True:
            n = self.rng.choice((2, 3, 3, 4))
            tok = "".join(self.rng.choice(_SYLLABLES) for _ in range(n))
            if tok not in self.used:
                self.used.add(tok)
                return tok.capitalize()


def _norm(word: str) -> str:
    return "".join(c for c in fold(word).lower() if c.isalpha())


class _Generator:
    def __init__(self, seed: int, params: SynthParams):
        self.rng = random.Random(seed)
        self.seed = seed
        self.p = params
        reserved = {_norm(w) for w in FIRST_NAMES + NOISE_WORDS}
        reserved |= {_norm(t) for p in PARTICLES for t in p.split()}
        reserved |= {_norm(t) for w in REAL_SURNAMES for t in w.split("-")}
        self.supply = _TokenSupply(self.rng, reserved)
        self.real = list(REAL_SURNAMES)
        self.rng.shuffle(self.real)

    # -- names --------------------------------------------------------------

    def core_surname(self) -> str:
        if self.real:
            return self.real.pop()
        return self.supply.take()

    def author_name(self, given_count: int) -> tuple[list[str], list[str]]:
        given = self.rng.sample(FIRST_NAMES, given_count)
        r = self.rng.random()
        if r < 0.1:
            surname = [self.core_surname() + "-" + self.core_surname()]
        elif r < 0.3:
            surname = [self.rng.choice(PARTICLES), self.core_surname()]
        else:
            surname = [self.core_surname()]
        return given, surname

    def decorate_display(self, text: str) -> str:
        r = self.rng.random()
        if r < 0.08:
            return "Dr. " + text
        if r < 0.12:
            return text + ", PhD"
        if r < 0.15:
            return text.upper()
        return text

    def noise_handle(self) -> str:
        letters = "".join(self.rng.choice("bcdfghjklmnpqrstvwxz") for _ in range(10))
        return letters + str(self.rng.randint(0, 99))

    def noise_profile(self) -> str:
        return " ".join(w.capitalize() for w in self.rng.sample(NOISE_WORDS, 2))

    # -- planted rendering ------------------------------------------------------

    def render_planted(self, given: list[str], surname: list[str], step_class: int) -> tuple[str, str]:
        g = [_norm(x) for x in given]
        s = [t for part in surname for t in fold(part).replace("-", " ").split()]
        s = [_norm(t) for t in s]
        last = "".join(s)
        initials = "".join(x[0] for x in g)
        title = lambda toks: " ".join(t.capitalize() for t in toks)  # noqa: E731
        handle, profile = self.noise_handle(), self.noise_profile()
        if step_class == 1:
            handle = g[0] + last
        elif step_class == 2:
            handle = "".join(g) + last
        elif step_class == 3:
            handle = initials + last
        elif step_class == 4:
            handle = g[0][0] + last
        elif step_class == 5:
            profile = " ".join(given + surname)
        elif step_class == 6:
            profile = title([g[0]] + s)
        elif step_class == 7:
            extra = self.rng.choice(NOISE_WORDS).capitalize()
            full = " ".join(given + surname)
            profile = f"{extra} {full}" if self.rng.random() < 0.5 else f"{full} {extra}"
        elif step_class == 8:
            # "J. W. Smith": one token per initial, so initials survive tokenization
            profile = " ".join(c.upper() + "." for c in initials) + " " + title(s)
        elif step_class == 9:
            profile = g[0][0].upper() + ". " + title(s)
        if step_class <= 4:
            r = self.rng.random()
            if r < 0.2:
                handle = "@" + handle
            elif r < 0.4:
                handle = handle.capitalize() + str(self.rng.randint(1, 99))
        elif self.rng.random() < 0.1:
            profile += " \U0001F9EA"
        return handle, profile

    # -- corpus -----------------------------------------------------------------

    def doi_text(self, i: int) -> str:
        return f"10.{5000 + self.seed % 1000}/syn.{self.seed}.{i}"

    def concepts(self) -> tuple[ConceptScore, ...]:
        picks = self.rng.sample(DISCIPLINES, self.rng.randint(1, 3))
        out = [ConceptScore(d, 0, round(self.rng.uniform(0.05, 0.95), 3)) for d in picks]
        if self.rng.random() < 0.3:
            out.append(ConceptScore(self.rng.choice(SUBFIELDS), 1, round(self.rng.random(), 3)))
        return tuple(out)

    def build(self) -> SyntheticCorpus:
        p, rng = self.p, self.rng
        n = p.n_authors
        planted_idx = sorted(rng.sample(range(n), p.n_planted))
        classes = {i: p.step_classes[k % len(p.step_classes)] for k, i in enumerate(planted_idx)}

        authors: list[AuthorRecord] = []
        names: list[tuple[list[str], list[str]]] = []
        for i in range(n):
            cls = classes.get(i)
            given_count = 2 if cls in _NEEDS_TWO_GIVEN else rng.choice((1, 1, 2))
            given, surname = self.author_name(given_count)
            names.append((given, surname))
            country = rng.choice(COUNTRIES) if rng.random() < 0.85 else None
            orcid = f"0000-0002-{i // 10000 % 10000:04d}-{i % 10000:04d}" if rng.random() < 0.3 else None
            authors.append(AuthorRecord(
                f"A{i:07d}", self.decorate_display(" ".join(given + surname)), orcid, country))

        works: list[WorkRecord] = []
        owned: list[list[str]] = [[] for _ in range(n)]
        for i in range(n):
            for _ in range(rng.randint(*p.works_per_author)):
                k = len(works)
                co = rng.sample(range(n), min(rng.randint(0, p.max_coauthors), n))
                team = [i] + [c for c in co if c != i]
                doi = self.doi_text(k)
                works.append(WorkRecord(f"W{k:08d}", doi, tuple(f"A{a:07d}" for a in team),
                                        self.concepts()))
                for a in team:
                    owned[a].append(doi)
        all_dois = [w.doi for w in works]

        n_tweeters = p.n_planted + p.n_distractors
        tids = [f"T{j:07d}" for j in range(n_tweeters)]
        rng.shuffle(tids)
        tweeters: list[TweeterProfile] = []
        events: list[TweetEvent] = []
        truth: dict[tuple[str, str], int] = {}
        tweet_no = 0

        def tweet(tid: str, doi: str) -> None:
            nonlocal tweet_no
            events.append(TweetEvent(f"tw{tweet_no:09d}", tid, doi))
            tweet_no += 1

        slot = 0
        for i in planted_idx:
            tid = tids[slot]
            slot += 1
            handle, profile = self.render_planted(*names[i], classes[i])
            tweeters.append(TweeterProfile(tid, handle, profile))
            truth[(f"A{i:07d}", tid)] = classes[i]
            for doi in rng.sample(owned[i], rng.randint(1, min(2, len(owned[i])))):
                tweet(tid, doi)

        n_homonyms = round(p.n_distractors * p.homonym_rate)
        for d in range(p.n_distractors):
            tid = tids[slot]
            slot += 1
            if d < n_homonyms:
                target = rng.randrange(n)
                initial = _norm(names[target][0][0])[0]
                same_initial = [f for f in FIRST_NAMES if _norm(f)[0] == initial]
                # half the homonyms also share the first initial
                pool = same_initial if rng.random() < 0.5 else FIRST_NAMES
                given = [rng.choice(pool)]
                surname = names[target][1]
                profile = " ".join(given + surname)
                s = "".join(_norm(t) for part in surname for t in part.replace("-", " ").split())
                handle = rng.choice((_norm(given[0])[0] + s, self.noise_handle()))
                tweeters.append(TweeterProfile(tid, handle, profile))
                tweet(tid, rng.choice(owned[target]))
            else:
                first, last = self.supply.take(), self.supply.take()
                handle = rng.choice((first + last, first[0] + last, self.noise_handle()))
                tweeters.append(TweeterProfile(tid, handle.lower(), f"{first} {last}"))
            for _ in range(rng.randint(1, 3)):
                tweet(tid, rng.choice(all_dois))

        while len(events) < p.n_events and tweeters:
            tid = tweeters[rng.randrange(len(tweeters))].tweeter_id
            if rng.random() < 0.05:
                tweet(tid, f"10.9999/untracked.{rng.randrange(10**6)}")
            else:
                tweet(tid, rng.choice(all_dois))

        tweeters.sort(key=lambda t: t.tweeter_id)
        golden = sorted(GoldenPair(a, t) for a, t in truth)
        corpus = Corpus(
            authors={a.author_id: a for a in authors},
            works=works,
            events=events,
            tweeters={t.tweeter_id: t for t in tweeters},
            golden=golden,
        )
        return SyntheticCorpus(corpus, truth)


def generate_synthetic_corpus(seed: int, params: SynthParams | None = None) -> SyntheticCorpus:
    params = params or SynthParams()
    params.validate()
    return _Generator(seed, params).build()

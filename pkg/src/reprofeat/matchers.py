"""Fuzzy matching of author names, titles and university names."""

from __future__ import annotations

import csv
import re
import string
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .ingest import AuthorName, ReferenceEntry

AUTHOR_THRESHOLD = 0.85
TITLE_THRESHOLD = 0.90
UNIVERSITY_THRESHOLD = 0.95
UNRANKED = 2.0
TOP_N = 100

_PUNCT = re.compile(f"[{re.escape(string.punctuation)}‘’“”–—]")


def normalize(text: str) -> str:
    """Strip accents and non-ASCII, lowercase, drop punctuation, collapse spaces."""
    decomposed = unicodedata.normalize("NFKD", text)
    ascii_only = decomposed.encode("ascii", "ignore").decode("ascii")
    return " ".join(_PUNCT.sub("", ascii_only.lower()).split())


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """``1 - distance / max(len)``; two empty strings are identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(a, b) / longest


def _initial(first: str) -> str:
    for ch in normalize(first):
        if ch.isalpha():
            return ch
    return ""


def same_author(a: AuthorName, b: AuthorName, threshold: float = AUTHOR_THRESHOLD) -> bool:
    ia, ib = _initial(a.first), _initial(b.first)
    if not ia or ia != ib:
        return False
    return similarity(normalize(a.last), normalize(b.last)) > threshold


class SelfCitation(NamedTuple):
    count: int
    ratio: float
    is_default: bool


def self_citation_ratio(
    authors: Sequence[AuthorName],
    refs: Sequence[ReferenceEntry],
    threshold: float = AUTHOR_THRESHOLD,
) -> SelfCitation:
    """Count references written by any author of the citing paper."""
    if not refs:
        return SelfCitation(0, 0.0, True)
    count = sum(
        any(same_author(pa, ra, threshold) for pa in authors for ra in ref.authors) for ref in refs
    )
    return SelfCitation(count, count / len(refs), False)


def title_match(query: str, candidate: str, threshold: float = TITLE_THRESHOLD) -> bool:
    return similarity(normalize(query), normalize(candidate)) > threshold


@dataclass
class RankTable:
    entries: dict[str, int] = field(default_factory=dict)
    acronyms: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name, rank in self.entries.items():
            if rank < 1:
                raise ValueError(f"rank for {name!r} must be >= 1, got {rank}")
        self.entries = {normalize(k): v for k, v in self.entries.items()}
        self.acronyms = {normalize(k): normalize(v) for k, v in self.acronyms.items()}

    @classmethod
    def load(cls, ranks: str | Path, acronyms: str | Path | None = None) -> "RankTable":
        """Read ``rank,name`` and ``acronym,full name`` CSV files (``#`` comments allowed)."""
        entries = {name: int(rank) for rank, name in _read_pairs(ranks)}
        acr = dict(_read_pairs(acronyms)) if acronyms else {}
        return cls(entries, acr)

    @classmethod
    def bundled(cls) -> "RankTable":
        data = resources.files("reprofeat") / "data"
        with resources.as_file(data / "university_ranks.csv") as r, resources.as_file(
            data / "university_acronyms.csv"
        ) as a:
            return cls.load(r, a)

    def lookup(self, name: str, threshold: float = UNIVERSITY_THRESHOLD) -> int | None:
        """Rank of the best match above ``threshold``, else None."""
        key = normalize(name)
        if not key:
            return None
        key = self.acronyms.get(key, key)
        if key in self.entries:
            return self.entries[key]
        best, best_rank = threshold, None
        for entry, rank in self.entries.items():
            s = similarity(key, entry)
            if s > best or (s == best and best_rank is not None and rank < best_rank):
                best, best_rank = s, rank
        return best_rank


def _read_pairs(path: str | Path) -> Iterable[tuple[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(line for line in fh if line.strip() and not line.startswith("#"))
        for row in rows:
            yield row[0].strip(), ",".join(row[1:]).strip()


def _segments(affiliation: str) -> list[str]:
    # affiliation strings usually carry department and city around the
    # institution, so every comma-separated piece is tried on its own
    parts = [p for p in re.split(r"[,;]", affiliation) if p.strip()]
    return [affiliation] + parts if len(parts) > 1 else parts


def university_rank(affiliation: str, table: RankTable, threshold: float = UNIVERSITY_THRESHOLD) -> int | None:
    ranks = [r for r in (table.lookup(s, threshold) for s in _segments(affiliation)) if r is not None]
    return min(ranks) if ranks else None


def u_rank(
    affiliations: Sequence[str | None], table: RankTable, threshold: float = UNIVERSITY_THRESHOLD
) -> tuple[float, bool]:
    """Normalized university rank and whether the default was used.

    Uses the first author's affiliation, falling back to the second. A match
    ranked ``R <= 100`` maps to ``1 - R/100``; anything else maps to 2.
    """
    chosen = next((a for a in affiliations[:2] if a and a.strip()), None)
    if chosen is None:
        return UNRANKED, True
    rank = university_rank(chosen, table, threshold)
    if rank is None:
        return UNRANKED, True
    if rank > TOP_N:
        return UNRANKED, False
    return 1.0 - rank / TOP_N, False

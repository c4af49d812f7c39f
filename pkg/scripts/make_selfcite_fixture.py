"""Regenerate tests/fixtures/selfcite_37.json.

Every person in the synthetic population has a stable id. A paper's true
self-citation ratio is computed from those ids (a reference counts when any
of its author ids belongs to the citing record), while the names written into the
references carry the noise seen in real bibliographies: initials, stripped
diacritics, "Last, First" ordering, transliterations, OCR-style typos and
unrelated people with near-identical surnames.

Usage: python scripts/make_selfcite_fixture.py [output_path]
"""

from __future__ import annotations

import json
import random
import sys
import unicodedata
from pathlib import Path

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "tests/fixtures/selfcite_37.json"

POPULATION = [
    ("Müller", "Katrin"), ("Schäfer", "Jonas"), ("García", "Lucía"), ("Nakamura", "Hiroshi"),
    ("Okafor", "Chinedu"), ("Kowalski", "Piotr"), ("Andersen", "Mette"), ("Dubois", "Camille"),
    ("Rossi", "Giulia"), ("Zhang", "Wei"), ("Petrov", "Ivan"), ("Fischer", "Lena"),
    ("Yilmaz", "Emre"), ("Lindqvist", "Sara"), ("Moreau", "Julien"), ("Castillo", "Diego"),
    ("Huang", "Mei"), ("Eriksen", "Lars"), ("Bauer", "Tobias"), ("Novak", "Eva"),
    ("Jensen", "Anders"), ("Van Dijk", "Pieter"), ("O'Brien", "Siobhan"), ("Schmidt", "Felix"),
    ("Takahashi", "Yuki"), ("Kim", "Minji"), ("Smith", "John"), ("Johnson", "Emily"),
    ("Williams", "Grace"), ("Brown", "Oliver"), ("Larsen", "Ingrid"), ("Weber", "Max"),
]
# Unrelated people whose surnames collide or nearly collide with the population.
NEAR_MISSES = [
    ("Mueller", "Karl"), ("Schaefer", "Julia"), ("Smyth", "James"), ("Jenson", "Amy"),
    ("Kim", "Minho"), ("Smith", "Jane"), ("Andersson", "Magnus"), ("Fisher", "Laura"),
]


def strip_accents(s: str) -> str:
    return unicodedata.normalize("NFKD", s).encode("ascii", "ignore").decode()


def typo(rng: random.Random, s: str) -> str:
    if len(s) < 6:
        return s
    i = rng.randrange(1, len(s) - 1)
    return s[:i] + s[i + 1:] if rng.random() < 0.5 else s[:i] + s[i + 1] + s[i] + s[i + 2:]


def transliterate(s: str) -> str:
    return s.replace("ü", "ue").replace("ä", "ae").replace("ö", "oe").replace("ß", "ss")


def render(rng: random.Random, last: str, first: str) -> str:
    """One bibliography rendering of a name, with realistic noise."""
    roll = rng.random()
    if roll < 0.12:
        last = strip_accents(last)
    elif roll < 0.20:
        last = transliterate(last)
    elif roll < 0.26:
        last = typo(rng, last)
    form = rng.random()
    if form < 0.35:
        return f"{last}, {first[0]}."
    if form < 0.55:
        return f"{first[0]}. {last}"
    if form < 0.75:
        return f"{last}, {first}"
    return f"{first} {last}"


def main() -> None:
    rng = random.Random(37)
    people = POPULATION + NEAR_MISSES
    n_core = len(POPULATION)
    records = []
    for i in range(37):
        author_ids = rng.sample(range(n_core), rng.randint(1, 4))
        n_refs = rng.randint(8, 40)
        self_rate = rng.choice([0.0, 0.05, 0.1, 0.2, 0.35, 0.5])
        refs = []
        true_self = 0
        for r in range(n_refs):
            ids = []
            if rng.random() < self_rate:
                ids.append(rng.choice(author_ids))
            for _ in range(rng.randint(1, 3)):
                ids.append(rng.choice([j for j in range(len(people)) if j not in author_ids]))
            rng.shuffle(ids)
            is_self = any(j in author_ids for j in ids)
            true_self += is_self
            refs.append({
                "title": f"Referenced work {i}.{r}",
                "authors": [render(rng, *people[j]) for j in ids],
                "author_ids": ids,
            })
        records.append({
            "id": f"sc{i:02d}",
            "authors": [{"last": people[j][0], "first": people[j][1]} for j in author_ids],
            "author_ids": author_ids,
            "references": refs,
            "true_ratio": true_self / n_refs,
        })
    OUT.write_text(json.dumps({"records": records}, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

"""Regenerate the bundled 20-paper demo corpus and its offline provider fixtures.

Usage: python scripts/make_demo_corpus.py [output_dir]

The output is deterministic. Papers with even index are labeled
reproducible; their generated metadata leans towards larger samples, smaller
p-values and more citations so that the analysis stages have signal to find.
"""

from __future__ import annotations

import json
import random
import shutil
import sys
from pathlib import Path

from reprofeat.metaclients.cache import slug

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/reprofeat/data/demo"

TOPICS = [
    "Ego Depletion", "Moral Licensing", "Anchoring Effects", "Social Priming", "Growth Mindset",
    "Power Posing", "Construal Level", "Facial Feedback", "Choice Overload", "Stereotype Threat",
    "Retrieval Practice", "Verbal Overshadowing", "Sunk Cost Reasoning", "Intergroup Contact",
    "Implicit Attitudes", "Delay Discounting", "Gratitude Journaling", "Warmth Perception",
    "Cognitive Dissonance", "Loss Aversion",
]
FIRST = ["Anna", "Brian", "Chen", "Dana", "Elif", "Farid", "Greta", "Hiro", "Ines", "Jonas", "Kofi", "Lena",
         "Marco", "Nadia", "Omar", "Priya", "Quinn", "Rosa", "Sven", "Tara"]
LAST = ["Andersen", "Bauer", "Castillo", "Dubois", "Eriksen", "Fischer", "García", "Huang", "Ivanova", "Jensen",
        "Kowalski", "Larsen", "Moreau", "Nakamura", "Okafor", "Petrov", "Quist", "Rossi", "Schäfer", "Tanaka",
        "Ueda", "Vogel", "Weber", "Xu", "Yilmaz", "Zhang"]
AFFILIATIONS = [
    "Department of Psychology, Stanford University, Stanford, CA",
    "School of Psychology, University of Oxford",
    "Department of Social Psychology, Tilburg University, Netherlands",
    "Harvard University",
    "Institute of Cognitive Science, University of Kent",
    "Department of Economics, Leiden University",
    "MIT",
    "Center for Behavioral Research, Institute of Nowhere",
    "Department of Psychology, University of Amsterdam",
    "University of Essex, Colchester",
]
VENUES = {
    "0956-7976": {"cite_score": 10.2, "snip": 2.9, "scholarly_output": 820, "percent_cited": 88.0,
                  "citation_count": 8364, "sjr": 4.1, "asjc_code": 3200},
    "0022-3514": {"cite_score": 12.1, "snip": 3.4, "scholarly_output": 640, "percent_cited": 91.0,
                  "citation_count": 7744, "sjr": 5.3, "asjc_code": 3207},
    "0278-7393": {"cite_score": 4.3, "snip": 1.5, "scholarly_output": 510, "percent_cited": 79.0,
                  "citation_count": 2193, "sjr": 1.9, "asjc_code": 3205},
    "1948-5506": {"cite_score": 6.0, "snip": 1.6, "scholarly_output": 390, "percent_cited": 83.0,
                  "citation_count": 2340, "sjr": 2.2, "asjc_code": 3207},
    "0001-8791": {"cite_score": 7.9, "snip": 2.4, "scholarly_output": 300, "percent_cited": 86.0,
                  "citation_count": 2370, "sjr": 2.8, "asjc_code": 3202},
}
ISSNS = list(VENUES) + ["9999-0000"]  # the last one has no fixture


def stat_sentences(rng: random.Random, good: bool, n: int) -> list[str]:
    out = []
    for _ in range(n):
        df = rng.randint(20, 140) if good else rng.randint(8, 40)
        p = rng.choice([".001", ".002", ".01", ".003"]) if good else rng.choice([".04", ".03", ".049", ".02", ".12"])
        op = "<" if p in (".001", ".002") else "="
        kind = rng.randrange(5)
        if kind == 0:
            out.append(f"Participants in the treatment condition scored higher, t({df}) = {rng.uniform(2, 6):.2f}, p {op} {p}.")
        elif kind == 1:
            out.append(f"The interaction was reliable, F(1, {df}) = {rng.uniform(4, 20):.2f}, p {op} {p}.")
        elif kind == 2:
            out.append(f"Choice proportions differed, χ2(1, N = {df * 3}) = {rng.uniform(4, 25):.2f}, p {op} {p}.")
        elif kind == 3:
            out.append(f"Scores correlated with the manipulation check, r({df}) = .{rng.randint(25, 60)}, p {op} {p}.")
        else:
            out.append(f"Overall the effect held across sites (p {op} {p}).")
    return out


def main() -> None:
    rng = random.Random(20210901)
    if OUT.exists():
        shutil.rmtree(OUT)
    corpus = OUT / "corpus"
    fixtures = OUT / "fixtures"
    for d in (corpus, fixtures / "papers", fixtures / "venues", fixtures / "authors"):
        d.mkdir(parents=True)

    people = [(LAST[i % len(LAST)], FIRST[(i * 7) % len(FIRST)]) for i in range(40)]
    author_metrics = {}
    for i, (last, first) in enumerate(people):
        if i % 9 == 8:
            continue  # no provider data for this author
        author_metrics[(last, first)] = {
            "pub_count": rng.randint(5, 160),
            "h_index": rng.randint(3, 60),
            "highly_influential_cites": rng.randint(0, 400),
            "total_cites": rng.randint(100, 20000),
        }

    graph: dict[str, dict] = {}
    manifest = []
    for i in range(20):
        good = i % 2 == 0
        year = rng.randint(2004, 2016)
        doi = f"10.5555/demo.{i:02d}"
        title = f"{TOPICS[i]} Revisited: Evidence from {rng.choice(['Three', 'Four', 'Five'])} Experiments"
        n_auth = rng.randint(2, 6) if good else rng.randint(1, 3)
        authors = rng.sample(people, n_auth)
        affiliations = [rng.choice(AFFILIATIONS[:6] if good else AFFILIATIONS) for _ in authors]
        refs = []
        n_refs = rng.randint(25, 60) if good else rng.randint(12, 35)
        self_share = 0.03 if good else 0.15
        for r in range(n_refs):
            if rng.random() < self_share:
                last, first = rng.choice(authors)
                ref_authors = [{"last": last, "first": first[0] + "."}]
            else:
                last, first = rng.choice(people)
                ref_authors = [{"last": last + ("son" if rng.random() < 0.5 else "ova"), "first": first}]
            refs.append({"title": f"Prior work {i}-{r}", "doi": None, "authors": ref_authors,
                         "year": year - rng.randint(1, 20)})

        n_stats = 0 if i in (3, 9, 14, 17) else (rng.randint(3, 8) if good else rng.randint(1, 4))
        paragraphs = [f"We report studies on {TOPICS[i].lower()}."]
        paragraphs += stat_sentences(rng, good, n_stats)
        if i % 3 != 1:
            paragraphs.insert(1, f"In total N = {rng.randint(150, 900) if good else rng.randint(20, 90)} adults took part.")
        body = " ".join(paragraphs)
        ack = None
        if i % 4 == 0:
            ack = "This research was supported by National Science Foundation grant BCS-1234."
        elif i % 4 == 1:
            ack = "We thank the research assistants who collected the data."
        record = {
            "doi": doi,
            "title": title,
            "pub_year": year,
            "authors": [{"last": last, "first": first} for last, first in authors],
            "affiliations": affiliations,
            "references": refs,
            "venue_issn": ISSNS[i % len(ISSNS)],
            "body_text": body,
            "ack_text": ack,
            "funded_override": True if i == 7 else None,
        }
        name = f"paper{i:02d}.json"
        (corpus / name).write_text(json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        manifest.append(f"{name},{int(good)}")

        pid = f"S2-{i:02d}"
        n_cite = rng.randint(40, 400) if good else rng.randint(5, 120)
        span = 2021 - year
        per_year = {}
        remaining = n_cite
        for k in range(span):
            share = remaining if k == span - 1 else rng.randint(0, max(remaining // 3, 1))
            per_year[str(year + k)] = share
            remaining -= share
        citers = [f"C{i:02d}-{j}" for j in range(rng.randint(2, 6))]
        graph[pid] = {"year": year, "references": []}
        for j, c in enumerate(citers):
            co = [f"Q{(i + m) % 25:02d}" for m in range(rng.randint(1, 4))]
            graph[c] = {"year": year + 1 + j % 4, "references": [pid] + co}
        paper = {
            "paper_id": pid,
            "title": title,
            "pub_year": year,
            "citations_scopus": n_cite if i % 5 != 2 else None,
            "citations_crossref": n_cite - rng.randint(0, 10) if i % 7 != 3 else None,
            "citation_velocity": rng.randint(1, 30) if i % 3 != 2 else None,
            "per_year_citations": per_year,
            "influential_citation_count": rng.randint(2, 40) if good else rng.randint(0, 12),
            "influential_references_count": rng.randint(3, 15) if good else rng.randint(0, 6),
            "references_count": n_refs + rng.randint(0, 3),
            "open_access": (rng.random() < 0.5) if i % 6 != 5 else None,
            "citing_paper_ids": citers,
            "intents_in": {"background": rng.randint(5, 80), "methodology": rng.randint(0, 20) + (8 if good else 0),
                           "result": rng.randint(0, 15)},
            "intents_out": {"background": rng.randint(10, 50), "methodology": rng.randint(0, 15),
                            "result": rng.randint(0, 10) + (5 if good else 0)},
            "upstream_influential_methodology_count": rng.randint(0, 6) + (2 if good else 0),
        }
        (fixtures / "papers" / f"{slug(doi)}.json").write_text(json.dumps(paper, indent=2) + "\n")

    for q in range(25):
        graph[f"Q{q:02d}"] = {"year": 2004 + (q * 5) % 17, "references": []}
    (fixtures / "graph.json").write_text(json.dumps({"papers": graph}, indent=1, sort_keys=True) + "\n")
    for issn, metrics in VENUES.items():
        (fixtures / "venues" / f"{slug(issn)}.json").write_text(json.dumps(metrics, indent=2) + "\n")
    for (last, first), metrics in author_metrics.items():
        (fixtures / "authors" / f"{slug(f'{last} {first}')}.json").write_text(json.dumps(metrics, indent=2) + "\n")
    (corpus / "manifest.csv").write_text("\n".join(manifest) + "\n")


if __name__ == "__main__":
    main()

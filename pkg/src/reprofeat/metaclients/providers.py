"""Metadata providers: an offline fixture store and three live web APIs.

Every provider answers with plain dicts shaped like ``ProviderRecord`` /
``VenueMetrics`` / ``AuthorMetrics`` fields, so responses can be cached as
JSON and merged uniformly by the client.

Fixture layout (one JSON file per identifier, file stem = ``slug(id)``)::

    <root>/papers/<slug of DOI or title>.json   ProviderRecord fields + "title"
    <root>/venues/<slug of ISSN>.json           VenueMetrics fields
    <root>/authors/<slug of "last first">.json  AuthorMetrics fields
    <root>/graph.json                           {"papers": {id: {"year": int,
                                                  "references": [id, ...]}}}
"""

from __future__ import annotations

import json
import os
from collections import Counter
from pathlib import Path
from typing import Any

from ..ingest import AuthorName
from .cache import slug
from .http import JsonTransport


def author_key(name: AuthorName) -> str:
    return f"{name.last} {name.first}".strip()


class Provider:
    name = "provider"
    live = False

    def paper(self, doi: str | None, title: str | None) -> list[dict[str, Any]]:
        return []

    def venue(self, issn: str) -> dict[str, Any] | None:
        return None

    def author(self, name: AuthorName) -> dict[str, Any] | None:
        return None


class FixtureProvider(Provider):
    name = "fixture"

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        if not self.root.is_dir():
            raise FileNotFoundError(f"fixture directory not found: {self.root}")

    def _load(self, kind: str, identifier: str) -> dict[str, Any] | None:
        path = self.root / kind / f"{slug(identifier)}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def paper(self, doi, title):
        for ident in (doi, title):
            if ident:
                found = self._load("papers", ident)
                if found is not None:
                    return [found]
        return []

    def venue(self, issn):
        return self._load("venues", issn)

    def author(self, name):
        return self._load("authors", author_key(name))

    def graph_data(self) -> dict[str, Any]:
        path = self.root / "graph.json"
        if not path.is_file():
            return {"papers": {}}
        return json.loads(path.read_text(encoding="utf-8"))


def _year(parts: Any) -> int | None:
    try:
        return int(parts["date-parts"][0][0])
    except (KeyError, IndexError, TypeError, ValueError):
        return None


def crossref_work_to_record(work: dict[str, Any]) -> dict[str, Any]:
    titles = work.get("title") or []
    year = None
    for key in ("published-print", "published-online", "issued", "published"):
        year = _year(work.get(key))
        if year:
            break
    return {
        "title": titles[0] if titles else None,
        "pub_year": year,
        "citations_crossref": work.get("is-referenced-by-count"),
        "references_count": work.get("references-count", work.get("reference-count")),
    }


class CrossrefProvider(Provider):
    name = "crossref"
    live = True

    def __init__(self, transport: JsonTransport, base_url: str = "https://api.crossref.org", mailto: str | None = None):
        self.transport = transport
        self.base_url = base_url.rstrip("/")
        self.mailto = mailto or os.environ.get("CROSSREF_MAILTO")

    def _params(self, extra: dict | None = None) -> dict:
        params = dict(extra or {})
        if self.mailto:
            params["mailto"] = self.mailto
        return params

    def paper(self, doi, title):
        if doi:
            data = self.transport.get_json(f"{self.base_url}/works/{doi}", params=self._params())
            if data and "message" in data:
                return [crossref_work_to_record(data["message"])]
        if title:
            data = self.transport.get_json(
                f"{self.base_url}/works", params=self._params({"query.bibliographic": title, "rows": 5})
            )
            items = (data or {}).get("message", {}).get("items", [])
            return [crossref_work_to_record(w) for w in items]
        return []


S2_FIELDS = (
    "paperId,title,year,citationCount,influentialCitationCount,referenceCount,isOpenAccess,"
    "citations.paperId,citations.year,citations.intents,"
    "references.paperId,references.intents,references.isInfluential"
)


def s2_paper_to_record(paper: dict[str, Any]) -> dict[str, Any]:
    citations = [c.get("citingPaper", c) if isinstance(c, dict) else {} for c in paper.get("citations") or []]
    references = [r.get("citedPaper", r) if isinstance(r, dict) else {} for r in paper.get("references") or []]

    def intents(items):
        counts = Counter()
        for item in items:
            for intent in item.get("intents") or []:
                counts[intent] += 1
        return {k: counts.get(k, 0) for k in ("background", "methodology", "result")}

    per_year = Counter(c["year"] for c in citations if c.get("year"))
    record = {
        "paper_id": paper.get("paperId"),
        "title": paper.get("title"),
        "pub_year": paper.get("year"),
        "citation_velocity": paper.get("citationVelocity"),
        "influential_citation_count": paper.get("influentialCitationCount"),
        "references_count": paper.get("referenceCount"),
        "open_access": paper.get("isOpenAccess"),
        "per_year_citations": {str(y): n for y, n in sorted(per_year.items())},
        "citing_paper_ids": [c["paperId"] for c in citations if c.get("paperId")],
    }
    if citations:
        record["intents_in"] = intents(citations)
    if references:
        record["intents_out"] = intents(references)
        record["influential_references_count"] = sum(bool(r.get("isInfluential")) for r in references)
        record["upstream_influential_methodology_count"] = sum(
            bool(r.get("isInfluential")) and "methodology" in (r.get("intents") or []) for r in references
        )
    return record


def s2_author_to_metrics(author: dict[str, Any]) -> dict[str, Any]:
    return {
        "pub_count": author.get("paperCount"),
        "h_index": author.get("hIndex"),
        "highly_influential_cites": author.get("influentialCitationCount"),
        "total_cites": author.get("citationCount"),
    }


class SemanticScholarProvider(Provider):
    name = "s2"
    live = True

    def __init__(self, transport: JsonTransport, base_url: str = "https://api.semanticscholar.org/graph/v1", api_key: str | None = None):
        self.transport = transport
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key or os.environ.get("S2_API_KEY")

    @property
    def headers(self) -> dict | None:
        return {"x-api-key": self.api_key} if self.api_key else None

    def paper(self, doi, title):
        if doi:
            data = self.transport.get_json(
                f"{self.base_url}/paper/DOI:{doi}", params={"fields": S2_FIELDS}, headers=self.headers
            )
            if data:
                return [s2_paper_to_record(data)]
        if title:
            data = self.transport.get_json(
                f"{self.base_url}/paper/search",
                params={"query": title, "limit": 5, "fields": S2_FIELDS},
                headers=self.headers,
            )
            return [s2_paper_to_record(p) for p in (data or {}).get("data", [])]
        return []

    def author(self, name):
        data = self.transport.get_json(
            f"{self.base_url}/author/search",
            params={"query": f"{name.first} {name.last}".strip(), "limit": 1,
                    "fields": "paperCount,hIndex,citationCount"},
            headers=self.headers,
        )
        hits = (data or {}).get("data") or []
        return s2_author_to_metrics(hits[0]) if hits else None

    def references_of(self, paper_id: str) -> list[str] | None:
        data = self.transport.get_json(
            f"{self.base_url}/paper/{paper_id}/references",
            params={"fields": "paperId,year", "limit": 1000},
            headers=self.headers,
        )
        if data is None:
            return None
        return [r["citedPaper"]["paperId"] for r in data.get("data", []) if r.get("citedPaper", {}).get("paperId")]

    def citers_of(self, paper_id: str) -> list[str] | None:
        data = self.transport.get_json(
            f"{self.base_url}/paper/{paper_id}/citations",
            params={"fields": "paperId", "limit": 1000},
            headers=self.headers,
        )
        if data is None:
            return None
        return [c["citingPaper"]["paperId"] for c in data.get("data", []) if c.get("citingPaper", {}).get("paperId")]

    def year_of(self, paper_id: str) -> int | None:
        data = self.transport.get_json(f"{self.base_url}/paper/{paper_id}", params={"fields": "year"}, headers=self.headers)
        return (data or {}).get("year")


def _first_metric(entry: dict, key: str) -> float | None:
    value = entry.get(key)
    if isinstance(value, list):
        value = value[0] if value else None
    if isinstance(value, dict):
        value = value.get("$")
    try:
        return float(value) if value is not None else None
    except (TypeError, ValueError):
        return None


def _flag(value: Any) -> bool | None:
    text = str(value).strip().lower()
    if text in ("1", "true"):
        return True
    if text in ("0", "false"):
        return False
    return None


def scopus_serial_to_metrics(entry: dict[str, Any]) -> dict[str, Any]:
    info = entry.get("citeScoreYearInfoList") or {}
    year_info = (info.get("citeScoreYearInfo") or [{}])[0]
    tracker = (year_info.get("citeScoreInformationList") or [{}])[0].get("citeScoreInfo") or [{}]
    tracker = tracker[0] if tracker else {}
    subjects = entry.get("subject-area") or []
    code = None
    if subjects:
        try:
            code = int(subjects[0].get("@code"))
        except (TypeError, ValueError):
            code = None
    return {
        "cite_score": _first_metric(info, "citeScoreCurrentMetric"),
        "snip": _first_metric(entry.get("SNIPList", {}), "SNIP"),
        "sjr": _first_metric(entry.get("SJRList", {}), "SJR"),
        "scholarly_output": _first_metric(tracker, "scholarlyOutput"),
        "percent_cited": _first_metric(tracker, "percentCited"),
        "citation_count": _first_metric(tracker, "citationCount"),
        "asjc_code": code,
    }


class ScopusProvider(Provider):
    name = "scopus"
    live = True

    def __init__(self, transport: JsonTransport, base_url: str = "https://api.elsevier.com", api_key: str | None = None):
        self.transport = transport
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key or os.environ.get("ELSEVIER_API_KEY")

    @property
    def headers(self) -> dict:
        return {"X-ELS-APIKey": self.api_key or "", "Accept": "application/json"}

    def paper(self, doi, title):
        if not (self.api_key and doi):
            return []
        data = self.transport.get_json(f"{self.base_url}/content/abstract/doi/{doi}", headers=self.headers)
        core = ((data or {}).get("abstracts-retrieval-response") or {}).get("coredata") or {}
        if not core:
            return []
        year = (core.get("prism:coverDate") or "")[:4]
        return [
            {
                "title": core.get("dc:title"),
                "pub_year": int(year) if year.isdigit() else None,
                "citations_scopus": int(core["citedby-count"]) if core.get("citedby-count") else None,
                "open_access": _flag(core.get("openaccessFlag")),
            }
        ]

    def venue(self, issn):
        if not self.api_key:
            return None
        data = self.transport.get_json(
            f"{self.base_url}/content/serial/title/issn/{issn}", params={"view": "ENHANCED"}, headers=self.headers
        )
        entries = ((data or {}).get("serial-metadata-response") or {}).get("entry") or []
        return scopus_serial_to_metrics(entries[0]) if entries else None

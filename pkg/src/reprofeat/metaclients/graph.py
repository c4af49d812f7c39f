from __future__ import annotations

from collections import defaultdict
from typing import Any, Protocol


class CitationGraph(Protocol):
    def citers(self, paper_id: str) -> list[str] | None: ...

    def references(self, paper_id: str) -> list[str] | None: ...

    def year(self, paper_id: str) -> int | None: ...


class InMemoryGraph:
    """Citation graph built from ``{id: {"year": int, "references": [...]}}``.

    Citers are the inverse of the reference lists. Unknown ids answer None.
    """

    def __init__(self, papers: dict[str, dict[str, Any]]):
        self._refs = {pid: list(dict.fromkeys(p.get("references") or [])) for pid, p in papers.items()}
        self._years = {pid: p.get("year") for pid, p in papers.items()}
        citers: dict[str, list[str]] = defaultdict(list)
        for pid in sorted(self._refs):
            for ref in self._refs[pid]:
                citers[ref].append(pid)
        self._citers = dict(citers)

    def citers(self, paper_id):
        if paper_id not in self._refs and paper_id not in self._citers:
            return None
        return list(self._citers.get(paper_id, []))

    def references(self, paper_id):
        refs = self._refs.get(paper_id)
        return None if refs is None else list(refs)

    def year(self, paper_id):
        return self._years.get(paper_id)

    def nodes(self) -> list[str]:
        return sorted(set(self._refs) | set(self._citers))


class CachedLiveGraph:
    """Graph access backed by a live provider exposing ``citers_of``/``references_of``/``year_of``."""

    def __init__(self, provider: Any, cache: Any):
        self.provider = provider
        self.cache = cache

    def _get(self, what: str, paper_id: str):
        namespace = f"{self.provider.name}-graph-{what}"
        hit, value = self.cache.get(namespace, paper_id)
        if not hit:
            value = getattr(self.provider, f"{what}_of")(paper_id)
            self.cache.put(namespace, paper_id, value)
        return value

    def citers(self, paper_id):
        return self._get("citers", paper_id)

    def references(self, paper_id):
        return self._get("references", paper_id)

    def year(self, paper_id):
        return self._get("year", paper_id)

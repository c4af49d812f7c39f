from __future__ import annotations

import logging
import os
import re
from typing import Any, Callable, Iterable, Sequence

from ..ingest import AuthorName, PaperRecord
from ..matchers import TITLE_THRESHOLD, title_match
from .cache import ResponseCache
from .graph import CachedLiveGraph, CitationGraph, InMemoryGraph
from .http import JsonTransport, ProviderError, TokenBucket
from .models import AuthorMetrics, ProviderRecord, VenueMetrics
from .providers import (
    CrossrefProvider,
    FixtureProvider,
    Provider,
    ScopusProvider,
    SemanticScholarProvider,
    author_key,
)

logger = logging.getLogger(__name__)

_DOI = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:)?(10\.\S+)$", re.I)


def split_identifier(identifier: str) -> tuple[str | None, str | None]:
    m = _DOI.match(identifier.strip())
    if m:
        return m.group(1), None
    return None, identifier


class MetadataClient:
    """Cache-first lookups against an ordered list of providers.

    Fields are taken from the first provider that supplies them (provider
    order is the precedence). Provider failures are logged and treated as
    misses; the caller always gets a record, possibly with every field absent.
    """

    def __init__(
        self,
        providers: Sequence[Provider],
        cache: ResponseCache | None = None,
        offline: bool = False,
        title_threshold: float = TITLE_THRESHOLD,
        graph: CitationGraph | None = None,
    ):
        self.offline = offline
        self.providers = [p for p in providers if not (offline and p.live)]
        self.cache = cache if cache is not None else ResponseCache()
        self.title_threshold = title_threshold
        self._graph = graph

    @classmethod
    def from_fixtures(cls, root: str | os.PathLike, cache_dir: str | os.PathLike | None = None) -> "MetadataClient":
        provider = FixtureProvider(root)
        return cls(
            [provider],
            cache=ResponseCache(cache_dir),
            offline=True,
            graph=InMemoryGraph(provider.graph_data().get("papers", {})),
        )

    @classmethod
    def live(
        cls,
        cache_dir: str | os.PathLike | None = None,
        rate: float = 1.0,
        base_urls: dict[str, str] | None = None,
        session: Any = None,
        sleep: Callable[[float], None] | None = None,
    ) -> "MetadataClient":
        base_urls = base_urls or {}
        extra = {"sleep": sleep} if sleep else {}

        def transport():
            limiter = TokenBucket(rate, **extra)
            return JsonTransport(session=session, limiter=limiter, **extra)

        s2 = SemanticScholarProvider(transport(), **({"base_url": base_urls["s2"]} if "s2" in base_urls else {}))
        crossref = CrossrefProvider(transport(), **({"base_url": base_urls["crossref"]} if "crossref" in base_urls else {}))
        scopus = ScopusProvider(transport(), **({"base_url": base_urls["scopus"]} if "scopus" in base_urls else {}))
        cache = ResponseCache(cache_dir)
        return cls([s2, crossref, scopus], cache=cache, graph=CachedLiveGraph(s2, cache))

    @property
    def graph(self) -> CitationGraph:
        return self._graph if self._graph is not None else InMemoryGraph({})

    def _call(self, provider: Provider, kind: str, key: str, fn: Callable[[], Any]) -> Any:
        namespace = f"{provider.name}-{kind}"
        hit, value = self.cache.get(namespace, key)
        if hit:
            return value
        try:
            value = fn()
        except (ProviderError, OSError, ValueError) as exc:
            logger.warning("%s lookup of %s %r failed: %s", provider.name, kind, key, exc)
            return None  # failures are not cached, a later run may succeed
        self.cache.put(namespace, key, value)
        return value

    def _accept(self, candidates: Iterable[dict], doi: str | None, title: str | None) -> dict | None:
        for cand in candidates or []:
            cand_title = cand.get("title")
            if title and cand_title:
                if title_match(title, cand_title, self.title_threshold):
                    return cand
                logger.warning("rejected candidate %r: title does not match %r", cand_title, title)
            elif doi:
                return cand
        return None

    def fetch(self, identifier: str, title: str | None = None) -> ProviderRecord:
        """Look a paper up by DOI (preferred) or title."""
        doi, query_title = split_identifier(identifier)
        title = title or query_title
        merged = ProviderRecord()
        for provider in self.providers:
            key = doi or title or ""
            candidates = self._call(provider, "paper", key, lambda p=provider: p.paper(doi, title))
            accepted = self._accept(candidates, doi, title)
            if accepted is not None:
                merged = merged.merged_with(ProviderRecord.from_dict(accepted))
        if merged.is_empty:
            logger.warning("no metadata found for %r", identifier)
        return merged

    def fetch_record(self, rec: PaperRecord) -> ProviderRecord:
        return self.fetch(rec.doi or rec.title, title=rec.title)

    def fetch_venue_metrics(self, issn: str | None) -> VenueMetrics:
        merged = VenueMetrics()
        if not issn:
            return merged
        for provider in self.providers:
            found = self._call(provider, "venue", issn, lambda p=provider: p.venue(issn))
            if found:
                merged = merged.merged_with(VenueMetrics.from_dict(found))
        return merged

    def fetch_author_metrics(self, authors: Sequence[AuthorName]) -> list[AuthorMetrics]:
        out = []
        for name in authors:
            merged = AuthorMetrics()
            for provider in self.providers:
                found = self._call(provider, "author", author_key(name), lambda p=provider, n=name: p.author(n))
                if found:
                    merged = merged.merged_with(AuthorMetrics.from_dict(found))
            out.append(merged)
        return out

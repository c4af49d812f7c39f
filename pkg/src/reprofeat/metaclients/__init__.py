"""Access to external scholarly-metadata providers, with caching and an offline fixture mode."""

from .cache import ResponseCache, normalize_identifier, slug
from .client import MetadataClient
from .graph import CitationGraph, InMemoryGraph
from .http import JsonTransport, ProviderError, TokenBucket
from .models import AuthorMetrics, ProviderRecord, VenueMetrics, merged_citation_count
from .providers import (
    CrossrefProvider,
    FixtureProvider,
    Provider,
    ScopusProvider,
    SemanticScholarProvider,
)

__all__ = [
    "AuthorMetrics",
    "CitationGraph",
    "CrossrefProvider",
    "FixtureProvider",
    "InMemoryGraph",
    "JsonTransport",
    "MetadataClient",
    "Provider",
    "ProviderError",
    "ProviderRecord",
    "ResponseCache",
    "ScopusProvider",
    "SemanticScholarProvider",
    "TokenBucket",
    "VenueMetrics",
    "merged_citation_count",
    "normalize_identifier",
    "slug",
]

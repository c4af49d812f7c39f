from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Any

INTENTS = ("background", "methodology", "result")


def _check_counts(obj: Any) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, (int, float)) and not isinstance(value, bool) and value < 0:
            raise ValueError(f"{type(obj).__name__}.{f.name} must be >= 0, got {value}")


def _intent_counts(raw: dict | None) -> dict[str, int] | None:
    if raw is None:
        return None
    counts = {k: int(raw.get(k, 0)) for k in INTENTS}
    if any(v < 0 for v in counts.values()):
        raise ValueError(f"intent counts must be >= 0: {counts}")
    return counts


@dataclass
class ProviderRecord:
    """Merged view of what the metadata providers know about one paper.

    ``None`` means the providers did not supply the value; defaults are
    applied later, during feature derivation.
    """

    paper_id: str | None = None
    title: str | None = None
    pub_year: int | None = None
    citations_scopus: int | None = None
    citations_crossref: int | None = None
    citation_velocity: int | None = None
    per_year_citations: dict[int, int] = field(default_factory=dict)
    influential_citation_count: int | None = None
    influential_references_count: int | None = None
    references_count: int | None = None
    open_access: bool | None = None
    citing_paper_ids: list[str] = field(default_factory=list)
    intents_in: dict[str, int] | None = None
    intents_out: dict[str, int] | None = None
    upstream_influential_methodology_count: int | None = None

    def __post_init__(self):
        _check_counts(self)
        self.per_year_citations = {int(y): int(c) for y, c in self.per_year_citations.items()}
        if any(c < 0 for c in self.per_year_citations.values()):
            raise ValueError("per-year citation counts must be >= 0")
        self.intents_in = _intent_counts(self.intents_in)
        self.intents_out = _intent_counts(self.intents_out)

    @property
    def is_empty(self) -> bool:
        return self == ProviderRecord()

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        # JSON object keys must be strings
        out["per_year_citations"] = {str(y): c for y, c in sorted(self.per_year_citations.items())}
        return out

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "ProviderRecord":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in known})

    def merged_with(self, other: "ProviderRecord") -> "ProviderRecord":
        """Fill fields that are still absent here from ``other``."""
        merged = {}
        for f in fields(self):
            mine, theirs = getattr(self, f.name), getattr(other, f.name)
            if f.name == "references_count" and mine is not None and theirs is not None:
                merged[f.name] = max(mine, theirs)
            elif mine is None or (isinstance(mine, (dict, list)) and not mine):
                merged[f.name] = theirs
            else:
                merged[f.name] = mine
        return ProviderRecord(**merged)


def merged_citation_count(rec: ProviderRecord) -> int:
    """Higher of the Scopus and Crossref counts; 0 when neither is known."""
    counts = [c for c in (rec.citations_scopus, rec.citations_crossref) if c is not None]
    return max(counts) if counts else 0


@dataclass
class VenueMetrics:
    cite_score: float | None = None
    snip: float | None = None
    scholarly_output: float | None = None
    percent_cited: float | None = None
    citation_count: float | None = None
    sjr: float | None = None
    asjc_code: int | None = None

    def __post_init__(self):
        _check_counts(self)
        if self.percent_cited is not None and self.percent_cited > 100:
            raise ValueError(f"percent_cited must be within [0, 100], got {self.percent_cited}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "VenueMetrics":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in known})

    def merged_with(self, other: "VenueMetrics") -> "VenueMetrics":
        return VenueMetrics(
            **{
                f.name: getattr(self, f.name) if getattr(self, f.name) is not None else getattr(other, f.name)
                for f in fields(self)
            }
        )


@dataclass
class AuthorMetrics:
    pub_count: float | None = None
    h_index: float | None = None
    highly_influential_cites: float | None = None
    total_cites: float | None = None

    def __post_init__(self):
        _check_counts(self)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "AuthorMetrics":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in known})

    def merged_with(self, other: "AuthorMetrics") -> "AuthorMetrics":
        return AuthorMetrics(
            **{
                f.name: getattr(self, f.name) if getattr(self, f.name) is not None else getattr(other, f.name)
                for f in fields(self)
            }
        )

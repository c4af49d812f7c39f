"""Per-paper feature derivation and the corpus feature matrix.

Canonical feature order (41 columns)::

    bibliometric  num_citations normalized_citations citation_Velocity
                  citation_next influentialCitationCount
                  influentialReferencesCount references_count self_citations
                  openaccessflag age coCite2 coCite3 u_rank
    author        author_count avg_pub avg_hidx avg_high_inf_cites
                  avg_auth_cites
    venue         Venue_CiteScore Venue_SNIP Venue_Scholarly_Output
                  Venue_Percent_Cited Venue_Citation_Count SJR
    statistical   real_p real_p_sign p_val_range num_hypo_tested extend_p
                  num_significant sample_size
    semantic      reference_background reference_methodology
                  reference_result citations_background
                  citations_methodology citations_result
                  upstream_influential_methodology_count funded subject
                  subject_code

Whenever an input is unavailable the feature takes its default value (0,
``false`` for openaccessflag, 2 for u_rank, 1.0 for real_p, id 0 for the
categorical subject columns) and its mask bit is set. Consumers must use the
mask, never the value, to decide whether a cell is real.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from statistics import fmean
from typing import Any, Iterable, NamedTuple, Sequence

import numpy as np

from .ingest import PaperRecord
from .matchers import AUTHOR_THRESHOLD, UNIVERSITY_THRESHOLD, RankTable, self_citation_ratio, u_rank
from .metaclients.graph import CitationGraph
from .metaclients.models import INTENTS, AuthorMetrics, ProviderRecord, VenueMetrics, merged_citation_count
from .statparse import StatFeatures

BIBLIOMETRIC = (
    "num_citations",
    "normalized_citations",
    "citation_Velocity",
    "citation_next",
    "influentialCitationCount",
    "influentialReferencesCount",
    "references_count",
    "self_citations",
    "openaccessflag",
    "age",
    "coCite2",
    "coCite3",
    "u_rank",
)
AUTHOR = ("author_count", "avg_pub", "avg_hidx", "avg_high_inf_cites", "avg_auth_cites")
VENUE = (
    "Venue_CiteScore",
    "Venue_SNIP",
    "Venue_Scholarly_Output",
    "Venue_Percent_Cited",
    "Venue_Citation_Count",
    "SJR",
)
STATISTICAL = (
    "real_p",
    "real_p_sign",
    "p_val_range",
    "num_hypo_tested",
    "extend_p",
    "num_significant",
    "sample_size",
)
SEMANTIC = (
    "reference_background",
    "reference_methodology",
    "reference_result",
    "citations_background",
    "citations_methodology",
    "citations_result",
    "upstream_influential_methodology_count",
    "funded",
    "subject",
    "subject_code",
)
FEATURE_NAMES: tuple[str, ...] = BIBLIOMETRIC + AUTHOR + VENUE + STATISTICAL + SEMANTIC
CATEGORICAL = frozenset({"subject", "subject_code"})
DEFAULT_VALUES = {name: 0.0 for name in FEATURE_NAMES} | {"u_rank": 2.0, "real_p": 1.0}

COCITE_WINDOWS = {"coCite2": 2, "coCite3": 3}

_FUNDING_PHRASES = re.compile(
    r"\b(?:funded by|supported by|grants?|funding|fellowship|financial support)\b", re.I
)
_AGENCIES = re.compile(
    r"\b(?:NSF|NIH|NIMH|ERC|DARPA|ESRC|DFG|NWO|NSERC|SSHRC|JSPS|ARC|ANR|SNSF|"
    r"National Science Foundation|National Institutes? of Health|European Research Council|"
    r"Economic and Social Research Council|Wellcome Trust|Templeton Foundation|"
    r"Deutsche Forschungsgemeinschaft|Horizon 2020)\b"
)


def funded_heuristic(ack_text: str | None) -> bool | None:
    """Keyword guess at whether an acknowledgement names a funder; None without text."""
    if not ack_text or not ack_text.strip():
        return None
    return bool(_FUNDING_PHRASES.search(ack_text) or _AGENCIES.search(ack_text))


class AsjcTable:
    """ASJC subject codes: the subject field id is the 4-digit code, the area id is 1..5."""

    def __init__(self, groups: dict[int, int], fields: dict[int, str] | None = None):
        self.groups = groups
        self.fields = fields or {}

    @classmethod
    def bundled(cls) -> "AsjcTable":
        data = resources.files("reprofeat") / "data"
        groups = {}
        for row in _csv_rows((data / "asjc_groups.csv").read_text(encoding="utf-8")):
            groups[int(row[0])] = int(row[-1])
        fields = {int(row[0]): row[1] for row in _csv_rows((data / "asjc_fields.csv").read_text(encoding="utf-8"))}
        return cls(groups, fields)

    def encode(self, code: int | None) -> tuple[int, int] | None:
        if code is None or not 1000 <= code <= 3699:
            return None
        area = self.groups.get(code // 100)
        return None if area is None else (code, area)


def _csv_rows(text: str) -> Iterable[list[str]]:
    return csv.reader(line for line in text.splitlines() if line.strip() and not line.startswith("#"))


@dataclass
class FeatureVector:
    values: dict[str, float]
    is_default: dict[str, bool]
    paper_id: str = ""

    def __post_init__(self):
        if tuple(self.values) != FEATURE_NAMES or tuple(self.is_default) != FEATURE_NAMES:
            raise ValueError("feature vector must carry exactly the 41 canonical features in order")

    def real(self, name: str) -> float | None:
        return None if self.is_default[name] else self.values[name]


class CoCitation(NamedTuple):
    coCite2: int
    coCite3: int
    is_default: bool


def co_citation_features(rec: PaperRecord, meta: ProviderRecord, graph: CitationGraph | None) -> CoCitation:
    """Count papers co-cited with the target, published within 2 and 3 years of it.

    A candidate is any paper referenced by a citer of the target; its
    co-citation index with the target is the number of papers citing both.
    """
    if graph is None or not meta.paper_id:
        return CoCitation(0, 0, True)
    target = meta.paper_id
    citers = graph.citers(target)
    if citers is None:
        citers = list(meta.citing_paper_ids) or None
    if citers is None:
        return CoCitation(0, 0, True)
    s_a = set(citers)
    y0 = rec.pub_year
    counts = dict.fromkeys(COCITE_WINDOWS, 0)
    seen: set[str] = set()
    for citer in sorted(s_a):
        for q in graph.references(citer) or []:
            if q == target or q in seen:
                continue
            seen.add(q)
            index = len(s_a & set(graph.citers(q) or []))
            year = graph.year(q)
            if index < 1 or year is None:
                continue
            for name, window in COCITE_WINDOWS.items():
                if y0 <= year <= y0 + window:
                    counts[name] += 1
    return CoCitation(counts["coCite2"], counts["coCite3"], False)


def _mean(values: Iterable[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return fmean(present) if present else None


def derive_features(
    rec: PaperRecord,
    meta: ProviderRecord,
    venue: VenueMetrics,
    authors: Sequence[AuthorMetrics],
    stats: StatFeatures,
    rank: RankTable,
    now_year: int,
    graph: CitationGraph | None = None,
    asjc: AsjcTable | None = None,
    author_threshold: float = AUTHOR_THRESHOLD,
    university_threshold: float = UNIVERSITY_THRESHOLD,
) -> FeatureVector:
    if now_year < rec.pub_year:
        raise ValueError(f"now_year {now_year} precedes publication year {rec.pub_year}")
    real: dict[str, float | None] = {}
    age = now_year - rec.pub_year

    has_citations = meta.citations_scopus is not None or meta.citations_crossref is not None
    citations = merged_citation_count(meta)
    real["num_citations"] = citations if has_citations else None
    real["normalized_citations"] = citations / age if has_citations and age > 0 else None
    real["citation_Velocity"] = meta.citation_velocity

    window = min(3, age)
    if meta.per_year_citations and window > 0:
        # year i of the window is the i-th calendar year starting at publication
        real["citation_next"] = sum(meta.per_year_citations.get(rec.pub_year + i, 0) for i in range(window)) / window
    else:
        real["citation_next"] = None
    real["influentialCitationCount"] = meta.influential_citation_count
    real["influentialReferencesCount"] = meta.influential_references_count
    real["references_count"] = meta.references_count

    selfcite = self_citation_ratio(rec.authors, rec.references, author_threshold)
    real["self_citations"] = None if selfcite.is_default else selfcite.ratio
    real["openaccessflag"] = None if meta.open_access is None else float(meta.open_access)
    real["age"] = age
    cocite = co_citation_features(rec, meta, graph)
    real["coCite2"] = None if cocite.is_default else cocite.coCite2
    real["coCite3"] = None if cocite.is_default else cocite.coCite3
    urank, urank_default = u_rank(rec.affiliations, rank, university_threshold)
    real["u_rank"] = None if urank_default else urank

    real["author_count"] = len(rec.authors) or None
    real["avg_pub"] = _mean(a.pub_count for a in authors)
    real["avg_hidx"] = _mean(a.h_index for a in authors)
    real["avg_high_inf_cites"] = _mean(a.highly_influential_cites for a in authors)
    real["avg_auth_cites"] = _mean(a.total_cites for a in authors)

    real["Venue_CiteScore"] = venue.cite_score
    real["Venue_SNIP"] = venue.snip
    real["Venue_Scholarly_Output"] = venue.scholarly_output
    real["Venue_Percent_Cited"] = venue.percent_cited
    real["Venue_Citation_Count"] = venue.citation_count
    real["SJR"] = venue.sjr

    stat_values = stats.as_dict()
    for name in STATISTICAL:
        real[name] = None if name in stats.defaults else stat_values[name]

    for prefix, counts in (("reference", meta.intents_out), ("citations", meta.intents_in)):
        for intent in INTENTS:
            real[f"{prefix}_{intent}"] = None if counts is None else counts[intent]
    real["upstream_influential_methodology_count"] = meta.upstream_influential_methodology_count
    funded = rec.funded_override if rec.funded_override is not None else funded_heuristic(rec.ack_text)
    real["funded"] = None if funded is None else float(funded)

    encoded = (asjc or AsjcTable.bundled()).encode(venue.asjc_code)
    real["subject"], real["subject_code"] = encoded if encoded else (None, None)

    values = {n: float(real[n]) if real[n] is not None else DEFAULT_VALUES[n] for n in FEATURE_NAMES}
    mask = {n: real[n] is None for n in FEATURE_NAMES}
    return FeatureVector(values, mask, paper_id=rec.identifier)


@dataclass
class FeatureMatrix:
    paper_ids: list[str]
    names: list[str]
    values: np.ndarray
    mask: np.ndarray  # True where the cell holds a default
    labels: list[bool | None] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.paper_ids), len(self.names))
        self.mask = np.asarray(self.mask, dtype=bool).reshape(self.values.shape)
        if not self.labels:
            self.labels = [None] * len(self.paper_ids)
        if len(self.labels) != len(self.paper_ids):
            raise ValueError("labels must align with rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def real_counts(self) -> dict[str, int]:
        return dict(zip(self.names, (~self.mask).sum(axis=0).tolist()))

    def select(self, names: Sequence[str]) -> "FeatureMatrix":
        unknown = [n for n in names if n not in self.names]
        if unknown:
            raise KeyError(f"unknown feature(s): {', '.join(unknown)}")
        idx = [self.names.index(n) for n in names]
        return FeatureMatrix(list(self.paper_ids), list(names), self.values[:, idx], self.mask[:, idx], list(self.labels))

    def drop(self, names: Iterable[str]) -> "FeatureMatrix":
        gone = set(names)
        return self.select([n for n in self.names if n not in gone])

    def labeled(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows with known labels as ``(X, y)``; y is 1 for reproducible."""
        rows = [i for i, lab in enumerate(self.labels) if lab is not None]
        y = np.array([int(self.labels[i]) for i in rows], dtype=int)
        return self.values[rows], y

    def with_values(self, values: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(list(self.paper_ids), list(self.names), values, self.mask.copy(), list(self.labels))


def assemble_matrix(vectors: Sequence[FeatureVector], labels: Sequence[bool | None]) -> FeatureMatrix:
    if len(vectors) != len(labels):
        raise ValueError(f"{len(vectors)} vectors but {len(labels)} labels")
    n = len(vectors)
    values = np.array([[v.values[f] for f in FEATURE_NAMES] for v in vectors], dtype=float).reshape(n, len(FEATURE_NAMES))
    mask = np.array([[v.is_default[f] for f in FEATURE_NAMES] for v in vectors], dtype=bool).reshape(n, len(FEATURE_NAMES))
    return FeatureMatrix([v.paper_id for v in vectors], list(FEATURE_NAMES), values, mask, list(labels))


def filter_core_features(m: FeatureMatrix, min_real: int = 15) -> FeatureMatrix:
    """Drop features with fewer than ``min_real`` non-default samples."""
    counts = m.real_counts()
    return m.select([n for n in m.names if counts[n] >= min_real])


def _fmt(x: float) -> str:
    return repr(float(x))


def _label_str(label: bool | None) -> str:
    return "" if label is None else str(int(label))


def _provenance_line(provenance: dict[str, Any] | None) -> str:
    return "" if provenance is None else "# provenance: " + json.dumps(provenance, sort_keys=True) + "\n"


def write_matrix(
    m: FeatureMatrix,
    values_path: str | os.PathLike,
    mask_path: str | os.PathLike | None = None,
    provenance: dict[str, Any] | None = None,
) -> None:
    """Write the value table and, optionally, the parallel mask table (1 = default)."""
    header = ["paper_id", "label", *m.names]
    for path, cell in ((values_path, _fmt), (mask_path, lambda b: str(int(b)))):
        if path is None:
            continue
        grid = m.values if cell is _fmt else m.mask
        buf = io.StringIO()
        buf.write(_provenance_line(provenance))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for pid, label, row in zip(m.paper_ids, m.labels, grid):
            writer.writerow([pid, _label_str(label), *(cell(x) for x in row)])
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _read_table(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))
    return rows[0], rows[1:]


def read_provenance(path: str | os.PathLike) -> dict[str, Any] | None:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    prefix = "# provenance: "
    return json.loads(first[len(prefix):]) if first.startswith(prefix) else None


def read_matrix(values_path: str | os.PathLike, mask_path: str | os.PathLike | None = None) -> FeatureMatrix:
    """Load a matrix written by ``write_matrix``; without a mask every cell is real."""
    header, rows = _read_table(values_path)
    if header[:2] != ["paper_id", "label"]:
        raise ValueError(f"{values_path}: header must start with paper_id,label")
    names = header[2:]
    ids = [r[0] for r in rows]
    labels = [None if r[1] == "" else bool(int(r[1])) for r in rows]
    values = np.array([[float(x) for x in r[2:]] for r in rows], dtype=float).reshape(len(rows), len(names))
    if mask_path is not None and Path(mask_path).exists():
        mheader, mrows = _read_table(mask_path)
        if mheader != header or [r[0] for r in mrows] != ids:
            raise ValueError(f"{mask_path} does not align with {values_path}")
        mask = np.array([[x == "1" for x in r[2:]] for r in mrows], dtype=bool).reshape(values.shape)
    else:
        mask = np.zeros(values.shape, dtype=bool)
    return FeatureMatrix(ids, names, values, mask, labels)

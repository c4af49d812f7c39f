"""Paper records and corpus loading.

A corpus lives on disk as one JSON file per paper plus a manifest. The
manifest is a plain text file with one ``relative_path,label`` line per
record, where label is ``0``, ``1`` or ``unknown``. Blank lines and lines
starting with ``#`` are ignored.

Record file schema (JSON object)::

    {
      "doi": "10.1000/xyz" | null,
      "title": "...",
      "pub_year": 2015,
      "authors": [{"last": "Doe", "first": "Jane"}, ...],
      "affiliations": ["Stanford University", ...],
      "references": [{"title": ..., "doi": ..., "year": ...,
                      "authors": [{"last": ..., "first": ...}]}],
      "venue_issn": "0956-7976" | null,
      "body_text": "...",
      "ack_text": "..." | null,
      "funded_override": true | false | null
    }

The label is kept in the manifest only, so the same record file can be used
in differently labeled corpora. Author entries may also be plain strings
("Jane Doe"), which are split on the final whitespace.
"""

from __future__ import annotations

import datetime
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

MANIFEST_NAME = "manifest.csv"
_LABELS = {"0": False, "1": True, "unknown": None}


class RecordError(ValueError):
    """A record file that does not match the schema."""

    def __init__(self, path: str | os.PathLike, field_name: str, message: str):
        self.path = str(path)
        self.field = field_name
        super().__init__(f"{self.path}: field {field_name!r}: {message}")


@dataclass(frozen=True)
class AuthorName:
    last: str
    first: str = ""

    @classmethod
    def parse(cls, name: str) -> "AuthorName":
        """Split ``"First Middle Last"`` on the final whitespace.

        ``"Last, First"`` is also accepted.
        """
        name = " ".join(name.split())
        if "," in name:
            last, _, first = name.partition(",")
            return cls(last=last.strip(), first=first.strip())
        first, _, last = name.rpartition(" ")
        return cls(last=last, first=first)

    def to_dict(self) -> dict[str, str]:
        return {"last": self.last, "first": self.first}


@dataclass(frozen=True)
class ReferenceEntry:
    title: str | None = None
    doi: str | None = None
    authors: tuple[AuthorName, ...] = ()
    year: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "doi": self.doi,
            "authors": [a.to_dict() for a in self.authors],
            "year": self.year,
        }


@dataclass
class PaperRecord:
    title: str
    pub_year: int
    doi: str | None = None
    authors: list[AuthorName] = field(default_factory=list)
    affiliations: list[str] = field(default_factory=list)
    references: list[ReferenceEntry] = field(default_factory=list)
    venue_issn: str | None = None
    body_text: str = ""
    ack_text: str | None = None
    funded_override: bool | None = None
    label: bool | None = None

    @property
    def identifier(self) -> str:
        """DOI when known, otherwise the title."""
        return self.doi or self.title

    def to_dict(self) -> dict[str, Any]:
        return {
            "doi": self.doi,
            "title": self.title,
            "pub_year": self.pub_year,
            "authors": [a.to_dict() for a in self.authors],
            "affiliations": list(self.affiliations),
            "references": [r.to_dict() for r in self.references],
            "venue_issn": self.venue_issn,
            "body_text": self.body_text,
            "ack_text": self.ack_text,
            "funded_override": self.funded_override,
        }


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def validate_record(r: PaperRecord, current_year: int | None = None) -> list[Violation]:
    """Check record invariants. Never raises; an empty list means valid."""
    if current_year is None:
        current_year = datetime.date.today().year
    out: list[Violation] = []
    title = r.title if isinstance(r.title, str) else ""
    if not title.strip():
        out.append(Violation("title", "must be non-empty"))
    if not (r.doi and r.doi.strip()) and not title.strip():
        out.append(Violation("doi/title", "identifier missing"))
    if not isinstance(r.pub_year, int) or isinstance(r.pub_year, bool):
        out.append(Violation("pub_year", "must be an integer year"))
    elif not 1900 <= r.pub_year <= current_year:
        out.append(Violation("pub_year", f"must be within [1900, {current_year}]"))
    for i, a in enumerate(r.authors):
        if not a.last.strip():
            out.append(Violation(f"authors[{i}].last", "must be non-empty"))
    for i, ref in enumerate(r.references):
        if not (ref.title or ref.doi or ref.authors or ref.year is not None):
            out.append(Violation(f"references[{i}]", "at least one field must be set"))
        for j, a in enumerate(ref.authors):
            if not a.last.strip():
                out.append(Violation(f"references[{i}].authors[{j}].last", "must be non-empty"))
    return out


def _author(obj: Any, path: Path, where: str) -> AuthorName:
    if isinstance(obj, str):
        return AuthorName.parse(obj)
    if isinstance(obj, dict) and isinstance(obj.get("last"), str):
        first = obj.get("first") or ""
        if not isinstance(first, str):
            raise RecordError(path, f"{where}.first", "must be a string")
        return AuthorName(last=obj["last"], first=first)
    raise RecordError(path, where, "expected a name string or {last, first} object")


def _opt(obj: dict, key: str, typ: type | tuple[type, ...], path: Path, where: str = ""):
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
        raise RecordError(path, where + key, f"expected {getattr(typ, '__name__', typ)}")
    return value


def record_from_dict(obj: Any, path: str | os.PathLike = "<record>") -> PaperRecord:
    """Build a PaperRecord from decoded JSON, raising RecordError on schema errors."""
    path = Path(path)
    if not isinstance(obj, dict):
        raise RecordError(path, "<root>", "expected a JSON object")
    title = obj.get("title")
    if not isinstance(title, str):
        raise RecordError(path, "title", "expected a string")
    pub_year = obj.get("pub_year")
    if not isinstance(pub_year, int) or isinstance(pub_year, bool):
        raise RecordError(path, "pub_year", "expected an integer")

    authors = [_author(a, path, f"authors[{i}]") for i, a in enumerate(obj.get("authors") or [])]
    affiliations = obj.get("affiliations") or []
    if not all(isinstance(a, str) for a in affiliations):
        raise RecordError(path, "affiliations", "expected a list of strings")

    refs = []
    for i, ref in enumerate(obj.get("references") or []):
        where = f"references[{i}]."
        if not isinstance(ref, dict):
            raise RecordError(path, f"references[{i}]", "expected an object")
        refs.append(
            ReferenceEntry(
                title=_opt(ref, "title", str, path, where),
                doi=_opt(ref, "doi", str, path, where),
                authors=tuple(
                    _author(a, path, f"{where}authors[{j}]")
                    for j, a in enumerate(ref.get("authors") or [])
                ),
                year=_opt(ref, "year", int, path, where),
            )
        )

    body = obj.get("body_text") or ""
    if not isinstance(body, str):
        raise RecordError(path, "body_text", "expected a string")
    record = PaperRecord(
        title=title,
        pub_year=pub_year,
        doi=_opt(obj, "doi", str, path),
        authors=authors,
        affiliations=list(affiliations),
        references=refs,
        venue_issn=_opt(obj, "venue_issn", str, path),
        body_text=body,
        ack_text=_opt(obj, "ack_text", str, path),
        funded_override=_opt(obj, "funded_override", bool, path),
    )
    return record


def load_record(path: str | os.PathLike) -> PaperRecord:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RecordError(path, "<root>", f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    record = record_from_dict(obj, path)
    problems = validate_record(record)
    if problems:
        raise RecordError(path, problems[0].field, problems[0].rule)
    return record


def read_manifest(path: str | os.PathLike) -> list[tuple[str, bool | None]]:
    path = Path(path)
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rel, sep, label = line.rpartition(",")
        if not sep or not rel.strip():
            raise RecordError(path, f"line {lineno}", "expected 'relative_path,label'")
        label = label.strip().lower()
        if label not in _LABELS:
            raise RecordError(path, f"line {lineno}", f"label must be 0, 1 or unknown, got {label!r}")
        entries.append((rel.strip(), _LABELS[label]))
    return entries


def load_corpus(path: str | os.PathLike) -> list[PaperRecord]:
    """Load records in manifest order.

    ``path`` is either a manifest file or a directory containing
    ``manifest.csv``. Record paths are resolved relative to the manifest.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus path does not exist: {path}")
    manifest = path / MANIFEST_NAME if path.is_dir() else path
    if not manifest.is_file():
        raise FileNotFoundError(f"no manifest found at {manifest}")
    records = []
    for rel, label in read_manifest(manifest):
        record_path = manifest.parent / rel
        if not record_path.is_file():
            raise RecordError(record_path, "<file>", "listed in manifest but missing")
        record = load_record(record_path)
        record.label = label
        records.append(record)
    return records


def save_corpus(records: Iterable[PaperRecord], directory: str | os.PathLike) -> Path:
    """Write records as ``NNN.json`` files plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, record in enumerate(records):
        name = f"{i:03d}.json"
        (directory / name).write_text(
            json.dumps(record.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        label = "unknown" if record.label is None else str(int(record.label))
        lines.append(f"{name},{label}")
    manifest = directory / MANIFEST_NAME
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest

"""Document ingestion and segmentation into analysis units.

A corpus is an immutable sequence of documents with source and date
metadata.  Documents are segmented into the row grain of every matrix
downstream: whole articles, individual paragraphs, or headlines.
Operations here are pure; ingestion is the only writer.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from .errors import CorpusError, IngestError

UNIT_KINDS = ("article", "paragraph", "headline")

_PARAGRAPH_BREAK = re.compile(r"\n\s*\n")


@dataclass(frozen=True)
class Document:
    """One raw document: id, source tag, publication instant, title, body."""

    id: str
    body: str = ""
    title: str | None = None
    source: str | None = None
    published_at: datetime | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise IngestError("document id must be a non-empty string")
        if not self.body and not self.title:
            raise IngestError(f"document {self.id!r} has neither body nor title")


@dataclass(frozen=True)
class DocumentUnit:
    """The row grain of analysis: an article, one paragraph, or a headline."""

    unit_id: str
    parent_id: str
    kind: str
    ordinal: int
    text: str


class Corpus:
    """Immutable collection of documents plus free-form provenance."""

    def __init__(self, name: str, documents: Iterable[Document], provenance: dict | None = None):
        self.name = name
        self.documents = tuple(documents)
        self.provenance = dict(provenance or {})
        self._by_id = {}
        for doc in self.documents:
            if doc.id in self._by_id:
                raise IngestError(f"duplicate document id {doc.id!r}")
            self._by_id[doc.id] = doc

    def __len__(self) -> int:
        return len(self.documents)

    def document(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def sources(self) -> list[str]:
        return sorted({d.source for d in self.documents if d.source})

    def date_range(self) -> tuple[datetime, datetime] | None:
        dates = [d.published_at for d in self.documents if d.published_at is not None]
        if not dates:
            return None
        return min(dates), max(dates)


def parse_timestamp(value: str | datetime) -> datetime:
    """Parse an ISO-8601 string into a timezone-aware UTC datetime."""
    if isinstance(value, datetime):
        dt = value
    else:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


_KNOWN_FIELDS = {"id", "body", "title", "source", "published_at"}


def ingest_jsonl(
    source: str | Path | Iterable[str],
    name: str | None = None,
    fail_fast: bool = False,
) -> Corpus:
    """Build a corpus from line-delimited JSON records.

    Each line must carry an ``id`` and at least one of ``body`` / ``title``.
    Malformed lines are collected into the corpus provenance under
    ``ingest_errors`` (or raised immediately when ``fail_fast``); a
    duplicate id is always an error.  Line order is preserved.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        lines = path.read_text(encoding="utf-8").splitlines()
        origin = str(path)
        if name is None:
            name = path.stem
    else:
        lines = list(source)
        origin = "<stream>"
        if name is None:
            name = "corpus"

    documents: list[Document] = []
    seen: set[str] = set()
    errors: list[dict] = []

    def report(line_no: int, message: str):
        if fail_fast:
            raise IngestError(f"line {line_no}: {message}")
        errors.append({"line": line_no, "error": message})

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            report(line_no, f"invalid JSON: {exc}")
            continue
        if not isinstance(record, dict) or not record.get("id"):
            report(line_no, "record missing required field 'id'")
            continue
        doc_id = str(record["id"])
        if doc_id in seen:
            raise IngestError(f"duplicate document id {doc_id!r} at line {line_no}")
        body = record.get("body") or ""
        title = record.get("title") or None
        if not body and not title:
            report(line_no, f"document {doc_id!r} has neither body nor title")
            continue
        published_at = None
        if record.get("published_at"):
            try:
                published_at = parse_timestamp(record["published_at"])
            except ValueError as exc:
                report(line_no, f"bad published_at: {exc}")
                continue
        extra = {k: v for k, v in record.items() if k not in _KNOWN_FIELDS}
        documents.append(
            Document(
                id=doc_id,
                body=body,
                title=title,
                source=record.get("source") or None,
                published_at=published_at,
                extra=extra,
            )
        )
        seen.add(doc_id)

    if not documents:
        raise IngestError("empty corpus: no valid records ingested")

    provenance = {
        "origin": origin,
        "n_records": len(documents),
        "n_errors": len(errors),
        "ingest_errors": errors,
    }
    return Corpus(name=name, documents=documents, provenance=provenance)


def segment(corpus: Corpus, kind: str = "article") -> list[DocumentUnit]:
    """Split every document into units of the requested kind.

    ``article`` yields one unit per document whose text equals the body;
    ``paragraph`` splits bodies on blank-line boundaries, trimming each
    paragraph; ``headline`` uses titles and requires every document to
    have one.
    """
    if kind not in UNIT_KINDS:
        raise CorpusError(f"unknown unit kind {kind!r}; expected one of {UNIT_KINDS}")
    if not corpus.documents:
        raise CorpusError("cannot segment an empty corpus")

    units: list[DocumentUnit] = []
    if kind == "headline":
        missing = [d.id for d in corpus.documents if not d.title]
        if missing:
            raise CorpusError(
                f"{len(missing)} document(s) lack a title for headline units: "
                + ", ".join(missing[:10])
            )
        for doc in corpus.documents:
            units.append(DocumentUnit(f"{doc.id}#h0", doc.id, "headline", 0, doc.title))
        return units

    for doc in corpus.documents:
        if kind == "article":
            units.append(DocumentUnit(f"{doc.id}#a0", doc.id, "article", 0, doc.body))
        else:
            paragraphs = [p.strip() for p in _PARAGRAPH_BREAK.split(doc.body)]
            paragraphs = [p for p in paragraphs if p]
            if not paragraphs and doc.body.strip():
                paragraphs = [doc.body.strip()]
            for ordinal, text in enumerate(paragraphs):
                units.append(DocumentUnit(f"{doc.id}#p{ordinal}", doc.id, "paragraph", ordinal, text))
    return units


def filter_window(
    units: Iterable[DocumentUnit],
    corpus: Corpus,
    start: datetime | str,
    end: datetime | str,
) -> list[DocumentUnit]:
    """Keep units whose parent was published in the half-open window [start, end)."""
    start = parse_timestamp(start)
    end = parse_timestamp(end)
    if start >= end:
        raise CorpusError(f"window start {start.isoformat()} is not before end {end.isoformat()}")
    kept = []
    for unit in units:
        published = corpus.document(unit.parent_id).published_at
        if published is None:
            raise CorpusError(f"document {unit.parent_id!r} has no published_at; cannot window")
        if start <= published < end:
            kept.append(unit)
    return kept


def filter_source(
    units: Iterable[DocumentUnit], corpus: Corpus, source: str
) -> list[DocumentUnit]:
    """Keep units whose parent carries the given source tag."""
    return [u for u in units if corpus.document(u.parent_id).source == source]


def source_predicate(source: str) -> Callable[[DocumentUnit, Document], bool]:
    return lambda unit, doc: doc.source == source


def window_predicate(start, end) -> Callable[[DocumentUnit, Document], bool]:
    start = parse_timestamp(start)
    end = parse_timestamp(end)

    def pred(unit: DocumentUnit, doc: Document) -> bool:
        if doc.published_at is None:
            raise CorpusError(f"document {doc.id!r} has no published_at; cannot window")
        return start <= doc.published_at < end

    return pred

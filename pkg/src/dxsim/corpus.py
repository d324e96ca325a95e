"""Case-document corpus: ingestion, validation, and lookup.

The corpus file is UTF-8 JSON Lines, one case document per line with the
required keys id, company, industry, sub_industry, year, text. Unknown keys
are ignored. A corpus is immutable after ingestion and safe to share across
threads.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, NamedTuple

from dxsim.errors import DuplicateId, EmptyCorpus, MalformedRecord, UnknownId

REQUIRED_KEYS = ("id", "company", "industry", "sub_industry", "year", "text")


@dataclass(frozen=True)
class CaseDocument:
    """One company's DX case."""

    id: str
    company: str
    industry: str
    sub_industry: str
    year: int
    text: str


class CaseMeta(NamedTuple):
    id: str
    company: str
    industry: str
    sub_industry: str
    year: int


class Corpus:
    """Ordered, id-indexed collection of case documents.

    Document order is ingestion order, so iteration is deterministic.
    """

    def __init__(self, documents: Iterable[CaseDocument]):
        self._documents: list[CaseDocument] = list(documents)
        self._by_id: dict[str, int] = {}
        for pos, doc in enumerate(self._documents):
            if doc.id in self._by_id:
                raise DuplicateId(doc.id, line_no=pos + 1)
            self._by_id[doc.id] = pos

    def __len__(self) -> int:
        return len(self._documents)

    def __iter__(self) -> Iterator[CaseDocument]:
        return iter(self._documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def ids(self) -> list[str]:
        return [doc.id for doc in self._documents]

    def get_case(self, doc_id: str) -> CaseDocument:
        try:
            return self._documents[self._by_id[doc_id]]
        except KeyError:
            raise UnknownId(doc_id) from None

    def list_cases(self, industry_filter: str | None = None) -> list[CaseMeta]:
        """Metadata tuples in ingestion order, optionally restricted to one
        industry (exact string match)."""
        out = []
        for doc in self._documents:
            if industry_filter is not None and doc.industry != industry_filter:
                continue
            out.append(CaseMeta(doc.id, doc.company, doc.industry, doc.sub_industry, doc.year))
        return out


def _parse_record(line_no: int, obj: object) -> CaseDocument:
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, f"expected a JSON object, got {type(obj).__name__}")
    missing = [k for k in REQUIRED_KEYS if k not in obj]
    if missing:
        raise MalformedRecord(line_no, f"missing keys: {', '.join(missing)}")
    for key in ("id", "company", "industry", "sub_industry", "text"):
        if not isinstance(obj[key], str):
            raise MalformedRecord(line_no, f"key {key!r} must be a string")
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int):
        raise MalformedRecord(line_no, "key 'year' must be an integer")
    if not obj["id"]:
        raise MalformedRecord(line_no, "key 'id' must be non-empty")
    if not obj["text"].strip():
        raise MalformedRecord(line_no, "key 'text' must be non-empty")
    for key in ("industry", "sub_industry"):
        if not obj[key]:
            raise MalformedRecord(line_no, f"key {key!r} must be non-empty")
    return CaseDocument(
        id=obj["id"],
        company=obj["company"],
        industry=obj["industry"],
        sub_industry=obj["sub_industry"],
        year=year,
        text=obj["text"],
    )


def ingest_corpus(source: BinaryIO | io.TextIOBase | Iterable[str], format: str = "jsonl") -> Corpus:
    """Read every record from a line-delimited stream into a Corpus.

    A duplicate id or a malformed line rejects the whole ingest; blank lines
    are skipped. Raises EmptyCorpus when no records are present.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    documents: list[CaseDocument] = []
    seen: dict[str, int] = {}
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid UTF-8: {exc}") from None
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from None
        doc = _parse_record(line_no, obj)
        if doc.id in seen:
            raise DuplicateId(doc.id, line_no)
        seen[doc.id] = line_no
        documents.append(doc)
    if not documents:
        raise EmptyCorpus()
    return Corpus(documents)


def load_corpus(path: str) -> Corpus:
    with open(path, "rb") as fh:
        return ingest_corpus(fh)


def validate_lines(source: BinaryIO | io.TextIOBase | Iterable[str]) -> tuple[int, list[str]]:
    """Scan a corpus stream and collect every per-line problem.

    Unlike ingest_corpus (which rejects on the first error), this reports all
    diagnostics at once for the `validate` subcommand. Returns (count of valid
    records, diagnostics).
    """
    diagnostics: list[str] = []
    seen: dict[str, int] = {}
    valid = 0
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                diagnostics.append(f"line {line_no}: invalid UTF-8: {exc}")
                continue
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            diagnostics.append(f"line {line_no}: invalid JSON: {exc.msg}")
            continue
        try:
            doc = _parse_record(line_no, obj)
        except MalformedRecord as exc:
            diagnostics.append(str(exc))
            continue
        if doc.id in seen:
            diagnostics.append(f"line {line_no}: duplicate id {doc.id!r} (first seen at line {seen[doc.id]})")
            continue
        seen[doc.id] = line_no
        valid += 1
    if valid == 0 and not diagnostics:
        diagnostics.append("corpus contains no records")
    return valid, diagnostics

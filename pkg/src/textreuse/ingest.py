"""Corpus loading and text normalization.

Documents arrive as line-delimited JSON records of pre-extracted plain text.
Normalization reduces each text to lowercase alphabetic tokens separated by
single spaces. All character offsets emitted by the downstream stages refer
to this normalized text, so the rules here are part of the output contract:

* a token is a maximal run of Unicode-alphabetic characters in the raw text,
  lowercased (characters whose lowercase expansion is not itself alphabetic
  are dropped from the token);
* everything between tokens collapses to a single space, with no leading or
  trailing whitespace;
* normalizing already-normalized text is the identity.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .jsonl import scan_jsonl

log = logging.getLogger(__name__)

# Superset of alphabetic runs (word chars minus digits and underscore); the
# rare wordish-but-not-alphabetic characters (numeric letters etc.) are
# stripped by the slow path in normalize().
_WORDISH = re.compile(r"[^\W\d_]+")

_METADATA_LISTS = ("field", "area", "discipline")


@dataclass(frozen=True)
class RawDocument:
    """One corpus record: plain text plus publication metadata."""

    doi: str
    text: str
    year: int | None = None
    field: tuple[str, ...] | None = None
    area: tuple[str, ...] | None = None
    discipline: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.doi, str) or not self.doi:
            raise ValueError("doi must be a non-empty string")
        if not isinstance(self.text, str):
            raise ValueError("text must be a string")
        for name in _METADATA_LISTS:
            values = getattr(self, name)
            if values is not None and any(not v for v in values):
                raise ValueError(f"{name} contains an empty string")


@dataclass(frozen=True)
class Document:
    """Normalized document with per-token offset maps.

    ``token_spans`` index into ``normalized_text``; ``raw_token_spans`` index
    into the original raw text, which lets external (raw-offset) annotations
    be carried over to normalized coordinates.
    """

    doi: str
    tokens: tuple[str, ...]
    token_spans: tuple[tuple[int, int], ...]
    raw_token_spans: tuple[tuple[int, int], ...]
    normalized_text: str
    year: int | None = None
    field: tuple[str, ...] | None = None
    area: tuple[str, ...] | None = None
    discipline: tuple[str, ...] | None = None

    @property
    def doc_length(self) -> int:
        return len(self.normalized_text)


def normalize(raw: RawDocument) -> Document:
    """Normalize a raw document into lowercase alphabetic tokens.

    The fast path handles runs that are purely alphabetic before and after
    lowercasing (virtually all text); the slow path re-splits runs around
    wordish-but-not-alphabetic characters and lowercase expansions.
    """
    if not isinstance(raw.text, str):
        raise TypeError("raw.text must be decoded text, not bytes")
    tokens: list[str] = []
    raw_spans: list[tuple[int, int]] = []
    for match in _WORDISH.finditer(raw.text):
        run = match.group()
        if run.isalpha():
            lowered = run.lower()
            if lowered.isalpha():
                tokens.append(lowered)
                raw_spans.append((match.start(), match.end()))
                continue
        _normalize_run(run, match.start(), tokens, raw_spans)

    normalized_text = " ".join(tokens)
    token_spans = []
    pos = 0
    for token in tokens:
        token_spans.append((pos, pos + len(token)))
        pos += len(token) + 1
    return Document(
        doi=raw.doi,
        tokens=tuple(tokens),
        token_spans=tuple(token_spans),
        raw_token_spans=tuple(raw_spans),
        normalized_text=normalized_text,
        year=raw.year,
        field=raw.field,
        area=raw.area,
        discipline=raw.discipline,
    )


def _normalize_run(run: str, base: int, tokens: list[str], raw_spans: list[tuple[int, int]]) -> None:
    """Slow path: split a wordish run on non-alphabetic characters."""
    i = 0
    while i < len(run):
        if run[i].isalpha():
            j = i + 1
            while j < len(run) and run[j].isalpha():
                j += 1
            token = run[i:j].lower()
            if not token.isalpha():
                token = "".join(c for c in token if c.isalpha())
            if token:
                tokens.append(token)
                raw_spans.append((base + i, base + j))
            i = j
        else:
            i += 1


def length_filter(doc: Document, min_words: int = 1000, max_words: int = 60000) -> bool:
    """Keep documents whose token count lies in [min_words, max_words]."""
    return min_words <= len(doc.tokens) <= max_words


@dataclass
class LoadReport:
    files: int = 0
    records: int = 0
    malformed: int = 0
    duplicates: int = 0


def parse_record(record: dict) -> RawDocument:
    """Validate and convert one corpus record; raises ValueError when malformed."""
    doi = record.get("doi")
    text = record.get("text")
    if not isinstance(doi, str) or not doi:
        raise ValueError("missing or invalid 'doi'")
    if not isinstance(text, str):
        raise ValueError("missing or invalid 'text'")
    year = record.get("year")
    if year is not None and (isinstance(year, bool) or not isinstance(year, int)):
        raise ValueError("'year' must be an integer")
    lists: dict[str, tuple[str, ...] | None] = {}
    for name in _METADATA_LISTS:
        values = record.get(name)
        if values is None:
            lists[name] = None
            continue
        if not isinstance(values, list) or any(not isinstance(v, str) or not v for v in values):
            raise ValueError(f"'{name}' must be an array of non-empty strings")
        lists[name] = tuple(values)
    return RawDocument(doi=doi, text=text, year=year, **lists)


def document_record(raw: RawDocument, text: str | None = None) -> dict:
    """Corpus-format record for a document; pass text to emit a rewritten body."""
    record = {"doi": raw.doi, "text": raw.text if text is None else text}
    if raw.year is not None:
        record["year"] = raw.year
    for name in _METADATA_LISTS:
        values = getattr(raw, name)
        if values is not None:
            record[name] = list(values)
    return record


def load_corpus(path: str | Path) -> list[RawDocument]:
    """Load a corpus file (or directory of ``*.jsonl`` files); see load_corpus_report."""
    docs, _ = load_corpus_report(path)
    return docs


def load_corpus_report(path: str | Path) -> tuple[list[RawDocument], LoadReport]:
    """Load raw documents in file order.

    Malformed lines are logged with their line number and skipped; duplicate
    dois are logged and the last record wins. An unreadable file is fatal.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.jsonl"))
        if not files:
            raise FileNotFoundError(f"no *.jsonl files in {path}")
    else:
        files = [path]

    report = LoadReport(files=len(files))
    by_doi: dict[str, RawDocument] = {}
    for file in files:
        for lineno, record, error in scan_jsonl(file):
            if error is None:
                try:
                    doc = parse_record(record)
                except ValueError as exc:
                    error = str(exc)
            if error is not None:
                report.malformed += 1
                log.error("%s:%d: skipping malformed record: %s", file, lineno, error)
                continue
            report.records += 1
            if doc.doi in by_doi:
                report.duplicates += 1
                log.warning("%s:%d: duplicate doi %r (last record wins)", file, lineno, doc.doi)
            by_doi[doc.doi] = doc
    return list(by_doi.values()), report

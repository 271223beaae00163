"""Seed-and-extend text alignment for one candidate document pair.

Both documents are chunked into overlapping word n-grams; n-grams with equal
hashes (re-verified by token equality) become seeds, and seeds whose
character gap is at most ``max_gap`` on *both* sides are merged transitively
into reuse cases. A case's spans are the bounding intervals of its member
seeds, so reordered or interleaved reuse still collapses into one case per
coherent region.
"""

from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass
from typing import Sequence

from . import spans as sp
from .ingest import Document

# Fixed root for deterministic case ids; run namespaces derive from it.
_CASE_NAMESPACE_ROOT = uuid.uuid5(uuid.NAMESPACE_URL, "textreuse/case")

CONTEXT_CHARS = 100


@dataclass(frozen=True)
class NGram:
    doi: str
    start_token: int
    char_span: tuple[int, int]
    hash: int


@dataclass(frozen=True, order=True)
class Seed:
    """A verified matching n-gram occurrence pair (char spans per side)."""

    span_a: tuple[int, int]
    span_b: tuple[int, int]


@dataclass(frozen=True)
class AlignmentParams:
    ngram_size: int = 8
    ngram_overlap: int = 7
    max_gap: int = 250
    min_seeds: int = 2

    def __post_init__(self):
        if self.ngram_size < 1:
            raise ValueError("ngram_size must be >= 1")
        if not 0 <= self.ngram_overlap < self.ngram_size:
            raise ValueError("ngram_overlap must satisfy 0 <= overlap < ngram_size")
        if self.max_gap < 0:
            raise ValueError("max_gap must be >= 0")
        if self.min_seeds < 1:
            raise ValueError("min_seeds must be >= 1")


@dataclass(frozen=True)
class ReuseCase:
    """One detected reuse case; field layout mirrors the emitted record."""

    id: str
    text_a: str
    before_a: str
    after_a: str
    begin_a: int
    end_a: int
    doc_length_a: int
    doi_a: str
    year_a: int | None
    field_a: tuple[str, ...] | None
    area_a: tuple[str, ...] | None
    discipline_a: tuple[str, ...] | None
    text_b: str
    before_b: str
    after_b: str
    begin_b: int
    end_b: int
    doc_length_b: int
    doi_b: str
    year_b: int | None
    field_b: tuple[str, ...] | None
    area_b: tuple[str, ...] | None
    discipline_b: tuple[str, ...] | None

    @property
    def pair_key(self) -> tuple[str, str]:
        return (self.doi_a, self.doi_b)


def ngram_hash(tokens: Sequence[str]) -> int:
    """64-bit hash of a token sequence; depends on the tokens only."""
    joined = " ".join(tokens).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(joined, digest_size=8).digest(), "big")


def chunk_ngrams(doc: Document, ngram_size: int = 8, ngram_overlap: int = 7) -> list[NGram]:
    """Sliding n-gram windows with stride ngram_size - ngram_overlap."""
    if ngram_size < 1:
        raise ValueError("ngram_size must be >= 1")
    if not 0 <= ngram_overlap < ngram_size:
        raise ValueError("ngram_overlap must satisfy 0 <= overlap < ngram_size")
    stride = ngram_size - ngram_overlap
    grams = []
    for start in range(0, len(doc.tokens) - ngram_size + 1, stride):
        window = doc.tokens[start : start + ngram_size]
        grams.append(
            NGram(
                doi=doc.doi,
                start_token=start,
                char_span=(doc.token_spans[start][0], doc.token_spans[start + ngram_size - 1][1]),
                hash=ngram_hash(window),
            )
        )
    return grams


def seed_matches(
    a: Document,
    b: Document,
    ngram_size: int = 8,
    ngram_overlap: int = 7,
) -> list[Seed]:
    """All n-gram occurrence pairs with equal hashes and equal tokens.

    Hash lookup makes this linear in the combined document length plus the
    number of matches; token re-comparison discards residual hash collisions.
    """
    by_hash: dict[int, list[NGram]] = {}
    for gram in chunk_ngrams(a, ngram_size, ngram_overlap):
        by_hash.setdefault(gram.hash, []).append(gram)
    seeds = []
    for gram_b in chunk_ngrams(b, ngram_size, ngram_overlap):
        for gram_a in by_hash.get(gram_b.hash, ()):
            tokens_a = a.tokens[gram_a.start_token : gram_a.start_token + ngram_size]
            tokens_b = b.tokens[gram_b.start_token : gram_b.start_token + ngram_size]
            if tokens_a == tokens_b:
                seeds.append(Seed(gram_a.char_span, gram_b.char_span))
    seeds.sort()
    return seeds


def extend(
    seeds: Sequence[Seed],
    max_gap: int = 250,
    min_seeds: int = 2,
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Merge seeds into cases by single-linkage clustering.

    Two seeds link iff their character gap is <= max_gap on both sides;
    clusters below min_seeds are discarded; surviving bounding boxes that
    overlap on both sides are fused so no nested duplicates are emitted.
    """
    if not seeds:
        return []
    ordered = sorted(seeds)
    n = len(ordered)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    # Sorted by span_a begin, any linkable pair (i, j) satisfies
    # begin_j - begin_i <= max_gap + longest span on side a, which bounds the
    # backward scan window.
    longest_a = max(s.span_a[1] - s.span_a[0] for s in ordered)
    window = max_gap + longest_a
    for j in range(n):
        begin_j = ordered[j].span_a[0]
        i = j - 1
        while i >= 0 and begin_j - ordered[i].span_a[0] <= window:
            if (
                sp.gap(ordered[i].span_a, ordered[j].span_a) <= max_gap
                and sp.gap(ordered[i].span_b, ordered[j].span_b) <= max_gap
            ):
                union(i, j)
            i -= 1

    clusters: dict[int, list[Seed]] = {}
    for idx, seed in enumerate(ordered):
        clusters.setdefault(find(idx), []).append(seed)

    boxes = [
        (sp.bounding([s.span_a for s in members]), sp.bounding([s.span_b for s in members]))
        for members in clusters.values()
        if len(members) >= min_seeds
    ]

    merged = True
    while merged:
        merged = False
        fused: list[tuple[tuple[int, int], tuple[int, int]]] = []
        for box in sorted(boxes):
            for k, other in enumerate(fused):
                if sp.overlaps(box[0], other[0]) and sp.overlaps(box[1], other[1]):
                    fused[k] = (sp.bounding([box[0], other[0]]), sp.bounding([box[1], other[1]]))
                    merged = True
                    break
            else:
                fused.append(box)
        boxes = fused
    return sorted(boxes)


def case_namespace(seed: int) -> uuid.UUID:
    """Run-scoped UUID namespace; case ids are reproducible given the seed."""
    return uuid.uuid5(_CASE_NAMESPACE_ROOT, str(seed))


def align_pair(
    a: Document,
    b: Document,
    params: AlignmentParams | None = None,
    namespace: uuid.UUID = _CASE_NAMESPACE_ROOT,
) -> list[ReuseCase]:
    """Detect all reuse cases between two documents.

    Callers supply the pair in canonical (doi_a < doi_b) order; the output
    labels sides by argument position and is sorted by (begin_a, begin_b).
    """
    params = params or AlignmentParams()
    seeds = seed_matches(a, b, params.ngram_size, params.ngram_overlap)
    merged = extend(seeds, params.max_gap, params.min_seeds)
    return [_materialize(a, b, span_a, span_b, namespace) for span_a, span_b in merged]


def _materialize(
    a: Document,
    b: Document,
    span_a: tuple[int, int],
    span_b: tuple[int, int],
    namespace: uuid.UUID,
) -> ReuseCase:
    key = f"{a.doi}|{b.doi}|{span_a[0]}|{span_a[1]}|{span_b[0]}|{span_b[1]}"
    return ReuseCase(
        id=str(uuid.uuid5(namespace, key)),
        **_side_fields("a", a, span_a),
        **_side_fields("b", b, span_b),
    )


def _side_fields(side: str, doc: Document, span: tuple[int, int]) -> dict:
    begin, end = span
    text = doc.normalized_text
    return {
        f"text_{side}": text[begin:end],
        f"before_{side}": text[max(0, begin - CONTEXT_CHARS) : begin],
        f"after_{side}": text[end : end + CONTEXT_CHARS],
        f"begin_{side}": begin,
        f"end_{side}": end,
        f"doc_length_{side}": doc.doc_length,
        f"doi_{side}": doc.doi,
        f"year_{side}": doc.year,
        f"field_{side}": doc.field,
        f"area_{side}": doc.area,
        f"discipline_{side}": doc.discipline,
    }


def case_from_record(record: dict) -> ReuseCase:
    """Rebuild a case from an emitted record; text fields may be absent
    (metadata-only files) and come back empty."""
    def side(side_key: str) -> dict:
        return {
            f"text_{side_key}": record.get(f"text_{side_key}", ""),
            f"before_{side_key}": record.get(f"before_{side_key}", ""),
            f"after_{side_key}": record.get(f"after_{side_key}", ""),
            f"begin_{side_key}": record[f"begin_{side_key}"],
            f"end_{side_key}": record[f"end_{side_key}"],
            f"doc_length_{side_key}": record[f"doc_length_{side_key}"],
            f"doi_{side_key}": record[f"doi_{side_key}"],
            f"year_{side_key}": record.get(f"year_{side_key}"),
            f"field_{side_key}": tuple(record.get(f"field_{side_key}") or ()) or None,
            f"area_{side_key}": tuple(record.get(f"area_{side_key}") or ()) or None,
            f"discipline_{side_key}": tuple(record.get(f"discipline_{side_key}") or ()) or None,
        }

    return ReuseCase(id=record["id"], **side("a"), **side("b"))


_TEXT_KEYS = ("text_a", "before_a", "after_a", "text_b", "before_b", "after_b")


def case_record(case: ReuseCase, include_text: bool = True) -> dict:
    """Emitted record for one case; metadata-only mode omits the text fields."""
    record = {
        "id": case.id,
        "text_a": case.text_a,
        "before_a": case.before_a,
        "after_a": case.after_a,
        "begin_a": case.begin_a,
        "end_a": case.end_a,
        "doc_length_a": case.doc_length_a,
        "doi_a": case.doi_a,
        "year_a": case.year_a,
        "field_a": list(case.field_a) if case.field_a else [],
        "area_a": list(case.area_a) if case.area_a else [],
        "discipline_a": list(case.discipline_a) if case.discipline_a else [],
        "text_b": case.text_b,
        "before_b": case.before_b,
        "after_b": case.after_b,
        "begin_b": case.begin_b,
        "end_b": case.end_b,
        "doc_length_b": case.doc_length_b,
        "doi_b": case.doi_b,
        "year_b": case.year_b,
        "field_b": list(case.field_b) if case.field_b else [],
        "area_b": list(case.area_b) if case.area_b else [],
        "discipline_b": list(case.discipline_b) if case.discipline_b else [],
    }
    if not include_text:
        for key in _TEXT_KEYS:
            del record[key]
    return record

"""Candidate retrieval: prune the quadratic document-pair space to pairs with
local bag-of-words similarity.

Documents are split into consecutive fixed-size passages; each passage's
distinct-term set is sketched with a family of seeded min-hashes, and an
inverted index over sketch values surfaces every document pair whose sketches
collide. This touches each sketch entry a bounded number of times, so the
whole stage is linear in corpus size (plus output).

MinHash collisions are probabilistic: a single hash function collides with
probability equal to the passage-pair Jaccard similarity, so low-similarity
passage pairs still collide occasionally. ``retrieve_candidates_exact`` is
the non-probabilistic companion: it enumerates exactly the pairs with a
passage-level overlap of at least ``min_shared_terms`` distinct terms, and
doubles as the testing oracle for the sketched path.
"""

from __future__ import annotations

import hashlib
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse

from .ingest import Document

log = logging.getLogger(__name__)

# uint64 lanes per keyed blake2b digest (64-byte digests)
_LANES = 8


@dataclass(frozen=True)
class Passage:
    """A consecutive block of tokens, represented by its distinct-term set."""

    doi: str
    index: int
    token_range: tuple[int, int]
    term_set: frozenset[str]


@dataclass(frozen=True)
class PassageSketch:
    doi: str
    passage_index: int
    hashes: frozenset[int]


@dataclass(frozen=True)
class CandidatePair:
    """Unordered document pair with collision evidence (canonical doi_a < doi_b)."""

    doi_a: str
    doi_b: str
    evidence: int = 1

    def __post_init__(self):
        if self.doi_a >= self.doi_b:
            raise ValueError("candidate pair must satisfy doi_a < doi_b")
        if self.evidence < 1:
            raise ValueError("evidence must be >= 1")

    @property
    def key(self) -> tuple[str, str]:
        return (self.doi_a, self.doi_b)


def chunk_passages(doc: Document, passage_size: int = 50) -> list[Passage]:
    """Partition a document into consecutive passages; the last may be shorter."""
    if passage_size < 1:
        raise ValueError("passage_size must be >= 1")
    passages = []
    for index, begin in enumerate(range(0, len(doc.tokens), passage_size)):
        end = min(begin + passage_size, len(doc.tokens))
        passages.append(
            Passage(
                doi=doc.doi,
                index=index,
                token_range=(begin, end),
                term_set=frozenset(doc.tokens[begin:end]),
            )
        )
    return passages


class MinHasher:
    """Family of ``num_hashes`` seeded hash functions over term sets.

    Function j of a term is lane j of a chain of keyed blake2b digests of the
    term (8 independent 64-bit lanes per digest; the key encodes the seed and
    the block index). The sketch of a term set is the per-function minimum.
    Per-term vectors are cached, so one instance should be reused across a
    corpus.
    """

    def __init__(self, num_hashes: int = 10, seed: int = 0):
        if num_hashes < 1:
            raise ValueError("num_hashes must be >= 1")
        self.num_hashes = num_hashes
        self.seed = seed
        blocks = (num_hashes + _LANES - 1) // _LANES
        self._keys = [f"{seed}:{block}".encode("utf-8")[:64] for block in range(blocks)]
        self._term_cache: dict[str, np.ndarray] = {}

    def term_vector(self, term: str) -> np.ndarray:
        """All hash-function values of one term; shape (num_hashes,)."""
        vector = self._term_cache.get(term)
        if vector is None:
            data = term.encode("utf-8")
            parts = [
                np.frombuffer(
                    hashlib.blake2b(data, digest_size=64, key=key).digest(), dtype=">u8"
                )
                for key in self._keys
            ]
            vector = np.concatenate(parts)[: self.num_hashes].astype(np.uint64)
            self._term_cache[term] = vector
        return vector

    def values(self, terms: Iterable[str]) -> np.ndarray:
        """Per-function minima over the term set; shape (num_hashes,)."""
        vectors = [self.term_vector(t) for t in terms]
        if not vectors:
            raise ValueError("cannot sketch an empty term set")
        return np.minimum.reduce(vectors)

    def sketch(self, passage: Passage) -> PassageSketch:
        values = self.values(passage.term_set)
        return PassageSketch(
            doi=passage.doi,
            passage_index=passage.index,
            hashes=frozenset(int(v) for v in values),
        )


@lru_cache(maxsize=8)
def _hasher(num_hashes: int, seed: int) -> MinHasher:
    return MinHasher(num_hashes, seed)


def minhash_sketch(passage: Passage, num_hashes: int = 10, *, seed: int) -> PassageSketch:
    """Sketch one passage; rejects empty term sets."""
    return _hasher(num_hashes, seed).sketch(passage)


def sketch_corpus(
    docs: Iterable[Document],
    passage_size: int = 50,
    num_hashes: int = 10,
    seed: int = 0,
) -> Iterator[PassageSketch]:
    """Sketch every passage of every document.

    Passages with fewer than two distinct terms are skipped: a near-constant
    passage sketches to copies of a single hash and floods the index.
    """
    hasher = MinHasher(num_hashes, seed)
    for doc in docs:
        for passage in chunk_passages(doc, passage_size):
            if len(passage.term_set) < 2:
                continue
            yield hasher.sketch(passage)


@dataclass
class PassageIndex:
    """Inverted index from sketch hash value to (doi, passage_index) postings."""

    postings: dict[int, list[tuple[str, int]]]
    dropped_hashes: int = 0


def build_index(sketches: Iterable[PassageSketch], df_cap: int = 1000) -> PassageIndex:
    """Build the inverted index; postings sorted by doi.

    Hashes occurring in more than ``df_cap`` distinct documents are dropped
    with a diagnostic: boilerplate-driven postings grow candidate output
    quadratically while carrying no pair-specific signal.
    """
    postings: dict[int, list[tuple[str, int]]] = defaultdict(list)
    for sketch in sketches:
        entry = (sketch.doi, sketch.passage_index)
        for value in sketch.hashes:
            postings[value].append(entry)
    kept: dict[int, list[tuple[str, int]]] = {}
    dropped = 0
    for value, entries in postings.items():
        if len({doi for doi, _ in entries}) > df_cap:
            dropped += 1
            continue
        kept[value] = sorted(entries)
    if dropped:
        log.warning("dropped %d over-frequent hash postings (df_cap=%d)", dropped, df_cap)
    return PassageIndex(postings=kept, dropped_hashes=dropped)


def retrieve_candidates(index: PassageIndex) -> set[CandidatePair]:
    """All unordered document pairs co-occurring in at least one posting.

    Evidence counts distinct (hash value, passage pair) co-occurrences.
    """
    evidence: Counter[tuple[str, str]] = Counter()
    for entries in index.postings.values():
        for i, (doi_i, _) in enumerate(entries):
            for doi_j, _ in entries[i + 1 :]:
                if doi_i != doi_j:
                    evidence[(doi_i, doi_j)] += 1
    return {CandidatePair(a, b, n) for (a, b), n in evidence.items()}


def retrieve_candidates_exact(
    docs: Sequence[Document],
    passage_size: int = 50,
    min_shared_terms: int = 9,
) -> set[CandidatePair]:
    """Exact candidate enumeration: pairs with some passage pair sharing
    at least ``min_shared_terms`` distinct terms.

    Implemented as a sparse passage-by-term matrix product computed in row
    blocks; evidence counts qualifying passage pairs. Unlike sketching, all
    passages participate (including short trailing ones), so this mode is
    sound for downstream alignment at min_shared_terms=1.
    """
    if min_shared_terms < 1:
        raise ValueError("min_shared_terms must be >= 1")
    dois: list[str] = []
    owner: list[int] = []
    term_cols: dict[str, int] = {}
    rows: list[int] = []
    cols: list[int] = []
    for doc_index, doc in enumerate(docs):
        dois.append(doc.doi)
        for passage in chunk_passages(doc, passage_size):
            row = len(owner)
            owner.append(doc_index)
            for term in passage.term_set:
                col = term_cols.setdefault(term, len(term_cols))
                rows.append(row)
                cols.append(col)
    if not owner:
        return set()

    matrix = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int32), (rows, cols)),
        shape=(len(owner), len(term_cols)),
    )
    transposed = matrix.T.tocsc()
    owner_arr = np.asarray(owner, dtype=np.int64)
    evidence: Counter[tuple[str, str]] = Counter()
    block = 4096
    for lo in range(0, len(owner), block):
        hi = min(lo + block, len(owner))
        shared = (matrix[lo:hi] @ transposed).tocoo()
        keep = shared.data >= min_shared_terms
        row_global = shared.row.astype(np.int64)[keep] + lo
        col = shared.col.astype(np.int64)[keep]
        upper = col > row_global
        row_global, col = row_global[upper], col[upper]
        doc_i, doc_j = owner_arr[row_global], owner_arr[col]
        cross = doc_i != doc_j
        for i, j in zip(doc_i[cross], doc_j[cross]):
            doi_i, doi_j = dois[i], dois[j]
            evidence[(doi_i, doi_j) if doi_i < doi_j else (doi_j, doi_i)] += 1
    return {CandidatePair(a, b, n) for (a, b), n in evidence.items()}


def write_candidates(path: str | Path, pairs: Iterable[CandidatePair]) -> int:
    """Spill candidate pairs to a tab-separated checkpoint file, sorted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for pair in sorted(pairs, key=lambda p: p.key):
            fh.write(f"{pair.doi_a}\t{pair.doi_b}\t{pair.evidence}\n")
            count += 1
    return count


def read_candidates(path: str | Path) -> list[CandidatePair]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            pairs.append(CandidatePair(parts[0], parts[1], int(parts[2])))
    return pairs

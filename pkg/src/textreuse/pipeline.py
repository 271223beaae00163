"""End-to-end batch pipeline: ingest -> retrieve -> align -> emit cases.

Stages communicate through files so a run can be checkpointed between
retrieval and alignment. All parallel work is order-insensitive and the
final outputs are produced by deterministic sorts, so identical
(config, corpus, seed) runs are byte-identical at any worker count.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import uuid
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

from .alignment import AlignmentParams, ReuseCase, align_pair, case_namespace, case_record
from .ingest import Document, length_filter, load_corpus_report, normalize
from .jsonl import scan_jsonl, write_jsonl
from .retrieval import (
    CandidatePair,
    build_index,
    read_candidates,
    retrieve_candidates,
    retrieve_candidates_exact,
    sketch_corpus,
    write_candidates,
)

log = logging.getLogger(__name__)

RETRIEVAL_MODES = ("minhash", "exact")
OUTPUT_MODES = ("full", "metadata-only")

CANDIDATES_FILE = "candidates.tsv"
CHECKPOINT_STATE_FILE = "retrieval.json"


class PipelineError(RuntimeError):
    pass


class CheckpointMismatch(PipelineError):
    pass


@dataclass
class RunConfig:
    """Effective configuration of one run; recorded verbatim in the manifest."""

    input: str
    output_dir: str
    min_words: int = 1000
    max_words: int = 60000
    passage_size: int = 50
    num_hashes: int = 10
    min_shared_terms: int = 9
    retrieval_mode: str = "minhash"
    df_cap: int = 1000
    ngram_size: int = 8
    ngram_overlap: int = 7
    max_gap: int = 250
    min_seeds: int = 2
    output_mode: str = "full"
    workers: int = 0  # 0 = available hardware parallelism
    seed: int = 1
    checkpoint_dir: str | None = None

    def validate(self) -> None:
        if self.retrieval_mode not in RETRIEVAL_MODES:
            raise ValueError(f"retrieval_mode must be one of {RETRIEVAL_MODES}")
        if self.output_mode not in OUTPUT_MODES:
            raise ValueError(f"output_mode must be one of {OUTPUT_MODES}")
        if self.min_words < 0 or self.max_words < self.min_words:
            raise ValueError("word filter range is empty")
        if self.passage_size < 1 or self.num_hashes < 1 or self.min_shared_terms < 1:
            raise ValueError("retrieval parameters must be >= 1")
        if self.df_cap < 1:
            raise ValueError("df_cap must be >= 1")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")
        self.alignment_params()  # validates the alignment block

    def alignment_params(self) -> AlignmentParams:
        return AlignmentParams(self.ngram_size, self.ngram_overlap, self.max_gap, self.min_seeds)

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


@dataclass
class PipelineResult:
    manifest: dict
    manifest_path: Path | None = None
    cases_path: Path | None = None
    publications_path: Path | None = None
    stats_path: Path | None = None
    candidates_path: Path | None = None


def load_documents(config: RunConfig) -> tuple[list[Document], dict]:
    """Load, normalize and length-filter the corpus; returns (docs, counts)."""
    raw_docs, report = load_corpus_report(config.input)
    docs = []
    filtered = 0
    for raw in raw_docs:
        doc = normalize(raw)
        if length_filter(doc, config.min_words, config.max_words):
            docs.append(doc)
        else:
            filtered += 1
    counts = {
        "documents_loaded": len(raw_docs),
        "documents_filtered": filtered,
        "documents_used": len(docs),
        "records_malformed": report.malformed,
        "duplicate_dois": report.duplicates,
    }
    return docs, counts


def run_retrieval(docs: Sequence[Document], config: RunConfig) -> list[CandidatePair]:
    """Candidate pairs for the configured mode, sorted canonically."""
    if config.retrieval_mode == "exact":
        pairs = retrieve_candidates_exact(docs, config.passage_size, config.min_shared_terms)
    else:
        sketches = sketch_corpus(docs, config.passage_size, config.num_hashes, config.seed)
        index = build_index(sketches, config.df_cap)
        pairs = retrieve_candidates(index)
    return sorted(pairs, key=lambda p: p.key)


def _align_batch(payload: tuple) -> list[ReuseCase]:
    pairs, params, namespace_hex = payload
    namespace = uuid.UUID(hex=namespace_hex)
    cases: list[ReuseCase] = []
    for doc_a, doc_b in pairs:
        cases.extend(align_pair(doc_a, doc_b, params, namespace))
    return cases


def _batch_with_retry(fn: Callable, payload: tuple, label: str) -> list[ReuseCase]:
    try:
        return fn(payload)
    except Exception as exc:
        log.warning("alignment batch %s failed (%s); retrying", label, exc)
        try:
            return fn(payload)
        except Exception as exc2:
            raise PipelineError(f"alignment failed for candidate pairs {label}") from exc2


def _batch_label(pairs: Sequence[tuple[Document, Document]]) -> str:
    first = (pairs[0][0].doi, pairs[0][1].doi)
    last = (pairs[-1][0].doi, pairs[-1][1].doi)
    return f"{first[0]}/{first[1]} .. {last[0]}/{last[1]}"


def run_alignment(
    docs: Sequence[Document],
    pairs: Sequence[CandidatePair],
    config: RunConfig,
) -> list[ReuseCase]:
    """Align all candidate pairs; output sorted by (doi_a, doi_b, begin_a)."""
    by_doi = {doc.doi: doc for doc in docs}
    params = config.alignment_params()
    namespace_hex = case_namespace(config.seed).hex
    ordered = sorted(pairs, key=lambda p: p.key)
    doc_pairs = []
    for pair in ordered:
        if pair.doi_a not in by_doi or pair.doi_b not in by_doi:
            raise PipelineError(f"candidate pair {pair.key} references unknown documents")
        doc_pairs.append((by_doi[pair.doi_a], by_doi[pair.doi_b]))

    workers = config.effective_workers()
    if not doc_pairs:
        return []
    batch_size = max(1, math.ceil(len(doc_pairs) / (workers * 4)))
    batches = [doc_pairs[i : i + batch_size] for i in range(0, len(doc_pairs), batch_size)]
    payloads = [(batch, params, namespace_hex) for batch in batches]

    results: list[list[ReuseCase]] = []
    if workers == 1 or len(batches) == 1:
        for batch, payload in zip(batches, payloads):
            results.append(_batch_with_retry(_align_batch, payload, _batch_label(batch)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_align_batch, payload) for payload in payloads]
            for batch, payload, future in zip(batches, payloads, futures):
                label = _batch_label(batch)
                try:
                    results.append(future.result())
                except Exception as exc:
                    log.warning("alignment batch %s failed in worker (%s); retrying", label, exc)
                    results.append(_batch_with_retry(_align_batch, payload, label))

    cases = [case for chunk in results for case in chunk]
    cases.sort(key=lambda c: (c.doi_a, c.doi_b, c.begin_a, c.begin_b))
    return cases


def _corpus_digest(path: str | Path) -> str:
    path = Path(path)
    files = sorted(path.glob("*.jsonl")) if path.is_dir() else [path]
    digest = hashlib.sha256()
    for file in files:
        digest.update(file.name.encode("utf-8"))
        with open(file, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
    return digest.hexdigest()


_RETRIEVAL_FIELDS = (
    "min_words",
    "max_words",
    "passage_size",
    "num_hashes",
    "min_shared_terms",
    "retrieval_mode",
    "df_cap",
    "seed",
)


def _retrieval_fingerprint(config: RunConfig, corpus_digest: str) -> str:
    payload = {name: getattr(config, name) for name in _RETRIEVAL_FIELDS}
    payload["corpus"] = corpus_digest
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def publication_record(doc: Document) -> dict:
    return {
        "doi": doc.doi,
        "doc_length": doc.doc_length,
        "year": doc.year,
        "field": list(doc.field) if doc.field else [],
        "area": list(doc.area) if doc.area else [],
        "discipline": list(doc.discipline) if doc.discipline else [],
    }


def run_pipeline(config: RunConfig, stop_after: str | None = None) -> PipelineResult:
    """Run the full pipeline; ``stop_after='retrieve'`` checkpoints and returns.

    With a checkpoint directory set, a rerun picks the candidate file up and
    skips retrieval; a checkpoint written under a different configuration or
    corpus is refused.
    """
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    docs, counts = load_documents(config)
    fingerprint = _retrieval_fingerprint(config, _corpus_digest(config.input))

    checkpoint_dir = Path(config.checkpoint_dir) if config.checkpoint_dir else None
    candidates_path = checkpoint_dir / CANDIDATES_FILE if checkpoint_dir else None
    pairs: list[CandidatePair] | None = None
    if checkpoint_dir is not None:
        state_path = checkpoint_dir / CHECKPOINT_STATE_FILE
        if state_path.exists() and candidates_path.exists():
            state = json.loads(state_path.read_text(encoding="utf-8"))
            if state.get("fingerprint") != fingerprint:
                raise CheckpointMismatch(
                    "checkpoint was written by a different configuration or corpus; refusing to resume"
                )
            pairs = read_candidates(candidates_path)
            log.info("resumed %d candidate pairs from %s", len(pairs), candidates_path)

    if pairs is None:
        pairs = run_retrieval(docs, config)
        if checkpoint_dir is not None:
            checkpoint_dir.mkdir(parents=True, exist_ok=True)
            write_candidates(candidates_path, pairs)
            state = {"fingerprint": fingerprint, "candidate_pairs": len(pairs)}
            (checkpoint_dir / CHECKPOINT_STATE_FILE).write_text(
                json.dumps(state, sort_keys=True) + "\n", encoding="utf-8"
            )

    total_pairs = math.comb(len(docs), 2)
    counts["candidate_pairs"] = len(pairs)
    counts["pruning_ratio"] = round(1.0 - len(pairs) / total_pairs, 6) if total_pairs else 1.0

    if stop_after == "retrieve":
        manifest = {"config": asdict(config), "counts": counts}
        return PipelineResult(manifest=manifest, candidates_path=candidates_path)
    if stop_after is not None:
        raise ValueError("stop_after must be None or 'retrieve'")

    cases = run_alignment(docs, pairs, config)
    counts["cases"] = len(cases)

    include_text = config.output_mode == "full"
    cases_path = out_dir / "cases.jsonl"
    write_jsonl(cases_path, (case_record(c, include_text) for c in cases))
    publications_path = out_dir / "publications.jsonl"
    write_jsonl(publications_path, (publication_record(d) for d in sorted(docs, key=lambda d: d.doi)))
    stats_path = out_dir / "stats.json"
    stats = summarize_cases(cases_path)
    stats_path.write_text(json.dumps(stats, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    manifest = {"config": asdict(config), "counts": counts}
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return PipelineResult(
        manifest=manifest,
        manifest_path=manifest_path,
        cases_path=cases_path,
        publications_path=publications_path,
        stats_path=stats_path,
        candidates_path=candidates_path,
    )


def summarize_cases(path: str | Path) -> dict:
    """Aggregate statistics over a case file; malformed records are counted."""
    by_year: Counter[str] = Counter()
    by_field: Counter[str] = Counter()
    by_area: Counter[str] = Counter()
    by_discipline: Counter[str] = Counter()
    length_hist: Counter[str] = Counter()
    partners: defaultdict[str, set[str]] = defaultdict(set)
    cases = 0
    malformed = 0
    for lineno, record, error in scan_jsonl(path):
        if error is None:
            error = _case_record_error(record)
        if error is not None:
            malformed += 1
            log.error("%s:%d: skipping malformed case: %s", path, lineno, error)
            continue
        cases += 1
        for side in ("a", "b"):
            year = record.get(f"year_{side}")
            if year is not None:
                by_year[str(year)] += 1
            for counter, key in ((by_field, "field"), (by_area, "area"), (by_discipline, "discipline")):
                for value in record.get(f"{key}_{side}") or []:
                    counter[value] += 1
            length = record[f"end_{side}"] - record[f"begin_{side}"]
            length_hist[str(length // 100 * 100)] += 1
        partners[record["doi_a"]].add(record["doi_b"])
        partners[record["doi_b"]].add(record["doi_a"])

    pairs_per_doc = Counter(str(len(p)) for p in partners.values())
    return {
        "cases": cases,
        "malformed": malformed,
        "by_year": dict(sorted(by_year.items())),
        "by_field": dict(sorted(by_field.items())),
        "by_area": dict(sorted(by_area.items())),
        "by_discipline": dict(sorted(by_discipline.items())),
        "case_length_hist": dict(sorted(length_hist.items(), key=lambda kv: int(kv[0]))),
        "pairs_per_document": dict(sorted(pairs_per_doc.items(), key=lambda kv: int(kv[0]))),
    }


def _case_record_error(record: dict) -> str | None:
    for side in ("a", "b"):
        for key in (f"begin_{side}", f"end_{side}"):
            if not isinstance(record.get(key), int):
                return f"missing or non-integer {key}"
        if record[f"begin_{side}"] < 0 or record[f"end_{side}"] <= record[f"begin_{side}"]:
            return f"invalid span on side {side}"
        if not isinstance(record.get(f"doi_{side}"), str) or not record[f"doi_{side}"]:
            return f"missing doi_{side}"
    return None

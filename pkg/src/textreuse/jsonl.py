"""Line-delimited JSON record helpers."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping


def read_jsonl(path: str | Path) -> Iterator[dict]:
    """Strict reader; raises on the first bad line."""
    for lineno, record, error in scan_jsonl(path):
        if error is not None:
            raise ValueError(f"{path}:{lineno}: {error}")
        yield record


def scan_jsonl(path: str | Path) -> Iterator[tuple[int, dict | None, str | None]]:
    """Lenient reader yielding (lineno, record, error); exactly one of record/error is set.

    The file is read as bytes so a single undecodable line is reported
    per-line instead of aborting the whole file.
    """
    with open(path, "rb") as fh:
        for lineno, blob in enumerate(fh, 1):
            if not blob.strip():
                continue
            try:
                record = json.loads(blob.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                yield lineno, None, str(exc)
                continue
            if not isinstance(record, dict):
                yield lineno, None, "record is not a JSON object"
                continue
            yield lineno, record, None


def write_jsonl(path: str | Path, records: Iterable[Mapping[str, Any]]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count

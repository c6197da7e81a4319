"""JSON Lines reading/writing helpers."""

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import MalformedLine


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, record) pairs; line numbers are 1-based.

    Blank lines are skipped. A line that is not a JSON object raises
    MalformedLine.
    """
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            if not isinstance(record, dict):
                raise MalformedLine(line_no, "expected a JSON object")
            yield line_no, record


def write_jsonl(path: str | Path, records: Iterable[dict[str, Any]]) -> int:
    """Write one compact JSON object per line (UTF-8); returns the count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count

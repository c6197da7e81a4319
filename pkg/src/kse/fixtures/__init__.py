"""Bundled fixture data: a 120-document mini corpus with 40 planted-evidence
samples, plus the evidence map that configures the mock generator, a
segmentation manifest, and a hand-audited metric case table.

Regenerate with ``scripts/make_fixtures.py``.
"""

import json
from pathlib import Path

_DIR = Path(__file__).parent


def corpus_path() -> Path:
    return _DIR / "mini_corpus.jsonl"


def dataset_path() -> Path:
    return _DIR / "mini_dataset.jsonl"


def evidence_map_path() -> Path:
    return _DIR / "evidence_map.json"


def manifest() -> dict:
    """doc_id -> sentence count, recorded at fixture construction time."""
    return json.loads((_DIR / "manifest.json").read_text(encoding="utf-8"))


def evidence_map() -> dict:
    """Markers for the mock generator plus per-sample planted evidence."""
    return json.loads(evidence_map_path().read_text(encoding="utf-8"))


def evidence_markers(path: str | Path | None = None) -> list[tuple[str, str]]:
    """(marker sentence, answer) pairs in file order."""
    data = evidence_map() if path is None else json.loads(Path(path).read_text(encoding="utf-8"))
    return [(m, a) for m, a in data["markers"]]


def metric_cases() -> list[dict]:
    return json.loads((_DIR / "metric_cases.json").read_text(encoding="utf-8"))


def checksums() -> dict:
    return json.loads((_DIR / "checksums.json").read_text(encoding="utf-8"))

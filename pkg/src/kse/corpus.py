"""Corpus and dataset loading.

Corpus files are JSON Lines, one ``{"id", "title", "text"}`` object per line.
Dataset files are JSON Lines with
``{"id", "question", "golden_answers", "evidence", "task"}`` records.
"""

from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateId, EmptyCorpus, MalformedLine, MissingEvidence, PreconditionViolation
from .jsonl import read_jsonl
from .segment import split_sentences

TASKS = ("open_qa", "fact_check", "dialogue")


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    text: str


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_idx: int
    text: str


@dataclass(frozen=True)
class Sample:
    id: str
    question: str
    golden_answers: tuple[str, ...]
    evidence: str | None = None
    task: str = "open_qa"

    def __post_init__(self):
        if not self.golden_answers:
            raise PreconditionViolation(f"sample {self.id!r}: golden_answers must be non-empty")
        if self.task not in TASKS:
            raise PreconditionViolation(f"sample {self.id!r}: unknown task {self.task!r}")
        if self.task == "fact_check" and not self.evidence:
            raise MissingEvidence(f"sample {self.id!r}: fact_check samples require evidence")


@dataclass
class Corpus:
    """Loaded documents, pre-segmented into sentences at ingest time."""

    documents: list[Document]
    by_id: dict[str, Document] = field(init=False)
    sentences: dict[str, list[Sentence]] = field(init=False)

    def __post_init__(self):
        self.by_id = {d.id: d for d in self.documents}
        self.sentences = {
            d.id: [Sentence(d.id, i, s) for i, s in enumerate(split_sentences(d.text))]
            for d in self.documents
        }

    def __len__(self) -> int:
        return len(self.documents)


def ingest_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a corpus file; rejects duplicate ids and malformed lines."""
    if format != "jsonl":
        raise PreconditionViolation(f"unsupported corpus format {format!r}")
    documents: list[Document] = []
    seen: set[str] = set()
    for line_no, record in read_jsonl(path):
        try:
            doc_id, title, text = record["id"], record["title"], record["text"]
        except KeyError as exc:
            raise MalformedLine(line_no, f"missing field {exc.args[0]!r}") from exc
        if not isinstance(doc_id, str) or not isinstance(title, str) or not isinstance(text, str):
            raise MalformedLine(line_no, "id, title and text must be strings")
        if not text.strip():
            raise MalformedLine(line_no, "text is empty")
        if doc_id in seen:
            raise DuplicateId(doc_id)
        seen.add(doc_id)
        documents.append(Document(id=doc_id, title=title, text=text))
    if not documents:
        raise EmptyCorpus(f"no documents in {path}")
    return Corpus(documents)


def load_dataset(path: str | Path) -> list[Sample]:
    """Load dataset samples, validating per-task requirements."""
    samples: list[Sample] = []
    seen: set[str] = set()
    for line_no, record in read_jsonl(path):
        try:
            sample = Sample(
                id=record["id"],
                question=record["question"],
                golden_answers=tuple(record["golden_answers"]),
                evidence=record.get("evidence"),
                task=record.get("task", "open_qa"),
            )
        except KeyError as exc:
            raise MalformedLine(line_no, f"missing field {exc.args[0]!r}") from exc
        if sample.id in seen:
            raise DuplicateId(sample.id)
        seen.add(sample.id)
        samples.append(sample)
    return samples

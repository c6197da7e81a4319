"""Supervised-distillation pair construction and serialization.

The refiner's training input is the question concatenated with the retrieved
documents (separator-joined); the target is the surviving evidence merged in
selection order. Targets are extractive: every target sentence appears
verbatim in the input.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Sample
from .errors import EmptyKse
from .index import RetrievedSet
from .jsonl import write_jsonl
from .synthesis import KseRecord

DEFAULT_SEPARATOR = "\n\n"


@dataclass(frozen=True)
class SftPair:
    input: str
    target: str
    sample_id: str


def build_sft_pair(
    sample: Sample,
    retrieved: RetrievedSet,
    kse: KseRecord,
    separator: str = DEFAULT_SEPARATOR,
) -> SftPair:
    kept = [n.text for n in kse.pool.selected if n.kept]
    if not kept:
        raise EmptyKse(f"sample {sample.id!r} has no surviving nuggets")
    input_text = separator.join([sample.question] + [doc.text for doc in retrieved.docs])
    return SftPair(input=input_text, target=" ".join(kept), sample_id=sample.id)


def export_jsonl(pairs: Iterable[SftPair], path: str | Path) -> int:
    return write_jsonl(
        path,
        ({"input": p.input, "target": p.target, "sample_id": p.sample_id} for p in pairs),
    )


def load_pairs(path: str | Path) -> list[SftPair]:
    from .jsonl import read_jsonl

    return [
        SftPair(input=r["input"], target=r["target"], sample_id=r["sample_id"])
        for _, r in read_jsonl(path)
    ]

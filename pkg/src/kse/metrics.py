"""Answer-quality metrics: exact match, token-level F1, label accuracy.

Normalization follows the common open-domain QA convention: lowercase,
strip punctuation, drop the articles a/an/the, collapse whitespace.
"""

import re
import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidLabel, PreconditionViolation

_ARTICLES = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)

FACT_CHECK_LABELS = ("SUPPORTS", "REFUTES")


def normalize_text(s: str) -> str:
    """Lowercase, strip punctuation, remove articles, collapse whitespace."""
    s = s.lower()
    s = s.translate(_PUNCT_TABLE)
    s = _ARTICLES.sub(" ", s)
    return " ".join(s.split())


def exact_match(pred: str, golds: Sequence[str]) -> int:
    """1 iff the normalized prediction equals any normalized gold answer."""
    if not golds:
        raise PreconditionViolation("exact_match requires at least one gold answer")
    pred_norm = normalize_text(pred)
    return int(any(pred_norm == normalize_text(g) for g in golds))


def _f1_single(pred_tokens: list[str], gold_tokens: list[str]) -> float:
    if not pred_tokens and not gold_tokens:
        return 1.0
    common = Counter(pred_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return (2 * precision * recall) / (precision + recall)


def token_f1(pred: str, golds: Sequence[str]) -> float:
    """Max over golds of the token-multiset F1 between pred and gold."""
    if not golds:
        raise PreconditionViolation("token_f1 requires at least one gold answer")
    pred_tokens = normalize_text(pred).split()
    return max(_f1_single(pred_tokens, normalize_text(g).split()) for g in golds)


def accuracy(pred: str, gold_label: str) -> int:
    """1 iff pred matches the gold verdict label.

    Equality is checked on normalized strings; as a fallback for verbose
    generations, a prediction containing the label as a standalone token
    also counts.
    """
    if gold_label.upper() not in FACT_CHECK_LABELS:
        raise InvalidLabel(f"gold label must be one of {FACT_CHECK_LABELS}, got {gold_label!r}")
    pred_norm = normalize_text(pred)
    label_norm = normalize_text(gold_label)
    return int(pred_norm == label_norm or label_norm in pred_norm.split())


def count_tokens(s: str, tokenizer=None) -> int:
    """Whitespace-delimited token count after trimming.

    A subword tokenizer (callable returning a token list) can be supplied
    for parity studies against reported counts; the default stays
    whitespace-based.
    """
    if tokenizer is not None:
        return len(tokenizer(s))
    return len(s.split())


@dataclass
class MetricReport:
    """Mean of per-sample scores plus the average context-token count."""

    metric: str  # em | token_f1 | accuracy
    value: float
    n_samples: int
    avg_tokens: float

    @classmethod
    def from_scores(cls, metric: str, scores: Iterable[float], token_counts: Iterable[int]) -> "MetricReport":
        scores = list(scores)
        tokens = list(token_counts)
        if not scores:
            raise PreconditionViolation("cannot aggregate an empty score list")
        return cls(
            metric=metric,
            value=sum(scores) / len(scores),
            n_samples=len(scores),
            avg_tokens=sum(tokens) / len(tokens) if tokens else 0.0,
        )


def metric_for_task(task: str) -> str:
    """Task-to-metric mapping used by the evaluation harness."""
    return {"open_qa": "em", "dialogue": "token_f1", "fact_check": "accuracy"}[task]


def score_answer(metric: str, pred: str, golds: Sequence[str]) -> float:
    if metric == "em":
        return float(exact_match(pred, golds))
    if metric == "token_f1":
        return token_f1(pred, golds)
    if metric == "accuracy":
        return float(accuracy(pred, golds[0]))
    raise InvalidLabel(f"unknown metric {metric!r}")

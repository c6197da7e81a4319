"""End-to-end comparison harness.

Evaluates the same sample set under multiple context conditions (no context,
full retrieved documents, each synthesis step's output, extractive baselines,
or a refiner provider), scoring generated answers with the task's metric and
accounting context tokens and per-query latency. Synthesis-step conditions
consume golden answers and are labeled as oracle modes in reports.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Sample
from .errors import EvalAborted, KseError, NoSentences, PreconditionViolation
from .index import RetrievedSet, tokenize
from .metrics import MetricReport, count_tokens, metric_for_task, score_answer
from .prompts import answer_prompt
from .providers import ProviderBundle, similarity
from .segment import split_sentences
from .synthesis import SynthesisConfig, build_fact, synthesize_steps

CONTEXT_SOURCES = (
    "none", "full_docs", "extract_step", "refine_step", "clean_step",
    "baseline_bm25", "baseline_embed", "refiner_provider",
)
ORACLE_SOURCES = ("extract_step", "refine_step", "clean_step")
DOC_SEPARATOR = "\n\n"


@dataclass(frozen=True)
class Condition:
    name: str
    context_source: str

    def __post_init__(self):
        if self.context_source not in CONTEXT_SOURCES:
            raise PreconditionViolation(f"unknown context source {self.context_source!r}")

    @property
    def is_oracle(self) -> bool:
        return self.context_source in ORACLE_SOURCES

    @classmethod
    def parse(cls, name: str) -> "Condition":
        return cls(name=name, context_source=name)


@dataclass
class SampleLog:
    sample_id: str
    score: float
    context_tokens: int
    refine_sec: float
    generate_sec: float


@dataclass
class ConditionResult:
    condition: Condition
    report: MetricReport
    samples: list[SampleLog]
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def refine_sec_per_query(self) -> float:
        return sum(s.refine_sec for s in self.samples) / len(self.samples)

    @property
    def generate_sec_per_query(self) -> float:
        return sum(s.generate_sec for s in self.samples) / len(self.samples)

    @property
    def sec_per_query(self) -> float:
        return self.refine_sec_per_query + self.generate_sec_per_query


def _bm25_sentence_scores(question: str, sentences: list[str]) -> list[float]:
    """BM25 over the candidate sentences, treating each sentence as a document."""
    import math

    token_lists = [tokenize(s) for s in sentences]
    n = len(sentences)
    avgdl = sum(len(t) for t in token_lists) / n
    df: dict[str, int] = {}
    for tokens in token_lists:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    k1, b = 0.9, 0.4
    seen: set[str] = set()
    terms = [t for t in tokenize(question) if not (t in seen or seen.add(t))]
    scores = []
    for tokens in token_lists:
        score = 0.0
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term in terms:
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(tokens) / avgdl))
        scores.append(score)
    return scores


def baseline_extract(
    retrieved: RetrievedSet,
    question: str,
    method: str,
    k_sent: int,
    embedder=None,
) -> str:
    """Top ``k_sent`` sentences by question relevance, in source order.

    ``bm25_sent`` scores sentences lexically; ``embed_topk`` by embedding
    similarity to the question.
    """
    if k_sent < 1:
        raise PreconditionViolation("k_sent must be >= 1")
    positions: list[tuple[int, int]] = []
    sentences: list[str] = []
    for doc_rank, doc in enumerate(retrieved.docs):
        for sent_idx, sent in enumerate(split_sentences(doc.text)):
            positions.append((doc_rank, sent_idx))
            sentences.append(sent)
    if not sentences:
        raise NoSentences("no sentences to extract from")
    if method == "bm25_sent":
        scores = _bm25_sentence_scores(question, sentences)
    elif method == "embed_topk":
        vectors = embedder.embed([question] + sentences)
        scores = [similarity(v, vectors[0]) for v in vectors[1:]]
    else:
        raise PreconditionViolation(f"unknown baseline method {method!r}")
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], positions[i]))
    chosen = sorted(order[:k_sent], key=lambda i: positions[i])
    return " ".join(sentences[i] for i in chosen)


def _build_context(
    sample: Sample,
    retrieved: RetrievedSet,
    condition: Condition,
    providers: ProviderBundle,
    syn_cfg: SynthesisConfig,
    k_sent: int,
) -> str:
    src = condition.context_source
    if src == "none":
        return ""
    if src == "full_docs":
        return DOC_SEPARATOR.join(doc.text for doc in retrieved.docs)
    if src in ORACLE_SOURCES:
        _, nugget_set, pool, record = synthesize_steps(sample, retrieved, syn_cfg, providers)
        if src == "extract_step":
            return nugget_set.text()
        if src == "refine_step":
            return pool.text()
        return record.kse_text
    if src == "baseline_bm25":
        return baseline_extract(retrieved, sample.question, "bm25_sent", k_sent)
    if src == "baseline_embed":
        return baseline_extract(retrieved, sample.question, "embed_topk", k_sent, providers.embedder)
    if src == "refiner_provider":
        if providers.refiner is None:
            raise PreconditionViolation("condition needs a refiner provider")
        return providers.refiner.refine(sample.question, [d.text for d in retrieved.docs])
    raise PreconditionViolation(f"unhandled context source {src!r}")


def run_condition(
    samples: Sequence[Sample],
    retrieved_map: dict[str, RetrievedSet],
    condition: Condition,
    providers: ProviderBundle,
    syn_cfg: SynthesisConfig,
    k_sent: int = 5,
    workers: int = 1,
    max_failure_rate: float = 0.1,
) -> ConditionResult:
    """Evaluate one condition over all samples.

    Per-sample provider failures are collected; if more than
    ``max_failure_rate`` of the samples fail, the run aborts.
    """

    def evaluate(sample: Sample) -> SampleLog:
        retrieved = retrieved_map[sample.id]
        t0 = time.perf_counter()
        context = _build_context(sample, retrieved, condition, providers, syn_cfg, k_sent)
        t1 = time.perf_counter()
        pred = providers.generator.generate_answer(answer_prompt(sample.question, context or None))
        t2 = time.perf_counter()
        metric = metric_for_task(sample.task)
        return SampleLog(
            sample_id=sample.id,
            score=score_answer(metric, pred, list(sample.golden_answers)),
            context_tokens=count_tokens(context),
            refine_sec=t1 - t0,
            generate_sec=t2 - t1,
        )

    logs: list[SampleLog | None] = [None] * len(samples)
    failures: list[tuple[str, str]] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(evaluate, s) for i, s in enumerate(samples)}
            for i, fut in futures.items():
                try:
                    logs[i] = fut.result()
                except KseError as exc:
                    failures.append((samples[i].id, str(exc)))
    else:
        for i, sample in enumerate(samples):
            try:
                logs[i] = evaluate(sample)
            except KseError as exc:
                failures.append((sample.id, str(exc)))
    if len(failures) > max_failure_rate * len(samples):
        raise EvalAborted(failures)
    ok = [log for log in logs if log is not None]
    if not ok:
        raise EvalAborted(failures)
    metric = metric_for_task(samples[0].task)
    report = MetricReport.from_scores(metric, (s.score for s in ok), (s.context_tokens for s in ok))
    return ConditionResult(condition=condition, report=report, samples=ok, failures=failures)


def compare_report(results: Sequence[ConditionResult]) -> tuple[str, list[dict]]:
    """Render aligned text table plus machine-readable records.

    Token reduction is measured against the ``full_docs`` condition when one
    is present.
    """
    if not results:
        raise PreconditionViolation("need at least one condition result")
    full_tokens = None
    for res in results:
        if res.condition.context_source == "full_docs":
            full_tokens = res.report.avg_tokens
    records = []
    for res in results:
        reduction = None
        if full_tokens and full_tokens > 0:
            reduction = 1.0 - res.report.avg_tokens / full_tokens
        records.append(
            {
                "condition": res.condition.name,
                "metric": res.report.metric,
                "value": res.report.value,
                "avg_tokens": res.report.avg_tokens,
                "token_reduction": reduction,
                "sec_per_query": res.sec_per_query,
                "n": res.report.n_samples,
            }
        )
    headers = ["condition", "metric", "value", "avg tok", "reduction", "refine s/q", "gen s/q", "n"]
    rows = []
    for res, rec in zip(results, records):
        name = res.condition.name + (" (oracle)" if res.condition.is_oracle else "")
        rows.append(
            [
                name,
                rec["metric"],
                f"{rec['value']:.3f}",
                f"{rec['avg_tokens']:.1f}",
                "-" if rec["token_reduction"] is None else f"{rec['token_reduction']:.1%}",
                f"{res.refine_sec_per_query:.4f}",
                f"{res.generate_sec_per_query:.4f}",
                str(rec["n"]),
            ]
        )
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines), records

"""Three-step synthesis of oracle key supporting evidence.

Given a sample (question + golden target) and its retrieved documents, the
pipeline:

1. **extract** - rank every sentence in the retrieved documents by embedding
   similarity to the fact (question + target) and keep the top ``k_extract``;
2. **refine**  - greedily move nuggets into a candidate pool by gain score
   (similarity to the fact minus mean similarity to the pool), stopping once
   an NLI model says the pool supports the fact strongly enough, or the
   support gain stalls;
3. **clean**   - drop pool nuggets (the first is always kept) whose
   normalized contribution to the generator's log-probability of the golden
   answer falls below a threshold.
"""

from dataclasses import dataclass, field

from .corpus import Sample
from .errors import KseError, MissingEvidence, NoSentences, PreconditionViolation
from .index import RetrievedSet
from .metrics import count_tokens
from .prompts import answer_prompt
from .providers import EmbeddingProvider, GeneratorProvider, NliProvider, ProviderBundle, similarity
from .segment import split_sentences


@dataclass(frozen=True)
class SynthesisConfig:
    k_extract: int = 7
    lambda_max: float = 0.5
    lambda_min: float = 0.01
    lambda_lm: float = 0.05
    top_k_docs: int = 5

    def __post_init__(self):
        if not (0 < self.lambda_min < self.lambda_max <= 1):
            raise PreconditionViolation("need 0 < lambda_min < lambda_max <= 1")
        if not (0 <= self.lambda_lm < 1):
            raise PreconditionViolation("need 0 <= lambda_lm < 1")
        if self.k_extract < 1:
            raise PreconditionViolation("k_extract must be >= 1")
        if self.top_k_docs < 1:
            raise PreconditionViolation("top_k_docs must be >= 1")


@dataclass(frozen=True)
class Fact:
    """Relevance query for synthesis: question text joined with its target."""

    text: str
    source: str  # answer | evidence


@dataclass
class Nugget:
    doc_id: str
    sent_idx: int
    text: str
    sim_to_fact: float
    doc_rank: int
    kappa: float | None = None
    tau_raw: float | None = None
    tau: float | None = None
    kept: bool = True

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "sent_idx": self.sent_idx,
            "text": self.text,
            "sim": self.sim_to_fact,
            "kappa": self.kappa,
            "tau_raw": self.tau_raw,
            "tau": self.tau,
            "kept": self.kept,
        }


@dataclass
class NuggetSet:
    """Extraction output: nuggets in non-increasing similarity order."""

    nuggets: list[Nugget]
    k_extract: int

    def text(self) -> str:
        return " ".join(n.text for n in self.nuggets)


@dataclass
class CandidatePool:
    """Refinement output: selected nuggets plus the support-degree history."""

    selected: list[Nugget]
    eta_history: list[float]
    terminated_by: str  # eta_max | eta_gain | exhausted

    def __post_init__(self):
        if len(self.selected) != len(self.eta_history):
            raise PreconditionViolation("eta_history length must equal pool size")
        if self.terminated_by not in ("eta_max", "eta_gain", "exhausted"):
            raise PreconditionViolation(f"bad terminated_by {self.terminated_by!r}")

    def text(self) -> str:
        return " ".join(n.text for n in self.selected)


@dataclass
class KseRecord:
    sample_id: str
    fact: Fact
    pool: CandidatePool
    kse_text: str
    stats: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "fact": self.fact.text,
            "nuggets": [n.to_record() for n in self.pool.selected],
            "eta_history": self.pool.eta_history,
            "terminated_by": self.pool.terminated_by,
            "kse_text": self.kse_text,
            "stats": self.stats,
        }


class SynthesisError(KseError):
    """A synthesis step failed; carries the step name."""

    def __init__(self, step: str, cause: Exception):
        self.step = step
        self.cause = cause
        super().__init__(f"{step}: {cause}")


def build_fact(sample: Sample) -> Fact:
    """Question joined with its golden target.

    Open-domain QA uses the first golden answer, unless annotated evidence is
    present (multi-hop style), in which case the evidence is the target.
    Fact checking always targets the evidence. Dialogue targets the golden
    response, keyed to the last user turn of the history.
    """
    if sample.task == "fact_check":
        if not sample.evidence:
            raise MissingEvidence(f"sample {sample.id!r} has no evidence")
        return Fact(text=f"{sample.question.strip()} {sample.evidence.strip()}", source="evidence")
    if sample.task == "dialogue":
        turns = [line.strip() for line in sample.question.splitlines() if line.strip()]
        last_turn = turns[-1] if turns else sample.question.strip()
        return Fact(text=f"{last_turn} {sample.golden_answers[0].strip()}", source="answer")
    if sample.evidence:
        return Fact(text=f"{sample.question.strip()} {sample.evidence.strip()}", source="evidence")
    return Fact(text=f"{sample.question.strip()} {sample.golden_answers[0].strip()}", source="answer")


def extract_nuggets(
    retrieved: RetrievedSet,
    fact: Fact,
    cfg: SynthesisConfig,
    embedder: EmbeddingProvider,
) -> NuggetSet:
    """Top ``k_extract`` sentences by similarity to the fact.

    Ties break toward lower document rank, then lower sentence index.
    """
    if not retrieved.docs:
        raise PreconditionViolation("retrieved set is empty")
    candidates: list[Nugget] = []
    texts: list[str] = []
    for doc_rank, doc in enumerate(retrieved.docs):
        for sent_idx, sent in enumerate(split_sentences(doc.text)):
            candidates.append(
                Nugget(doc_id=doc.id, sent_idx=sent_idx, text=sent, sim_to_fact=0.0, doc_rank=doc_rank)
            )
            texts.append(sent)
    if not candidates:
        raise NoSentences("retrieved documents contain no sentences")
    vectors = embedder.embed([fact.text] + texts)
    fact_vec = vectors[0]
    for nugget, vec in zip(candidates, vectors[1:]):
        nugget.sim_to_fact = similarity(vec, fact_vec)
    candidates.sort(key=lambda n: (-n.sim_to_fact, n.doc_rank, n.sent_idx))
    return NuggetSet(nuggets=candidates[: cfg.k_extract], k_extract=cfg.k_extract)


def refine_nuggets(
    nuggets: NuggetSet,
    fact: Fact,
    cfg: SynthesisConfig,
    embedder: EmbeddingProvider,
    nli: NliProvider,
) -> CandidatePool:
    """Greedy gain-score selection with support-degree termination.

    Each round recomputes, for every remaining nugget, its similarity to the
    fact minus the mean similarity to the already-selected pool (zero when
    the pool is empty), moves the best nugget in, and re-measures how well
    the pool supports the fact. Selection stops when support reaches
    ``lambda_max``, when the support gain drops below ``lambda_min`` (from
    the second round on), or when the nugget set is exhausted.
    """
    pool_nuggets = nuggets.nuggets
    if not pool_nuggets:
        raise PreconditionViolation("cannot refine an empty nugget set")
    vectors = embedder.embed([n.text for n in pool_nuggets])
    n = len(pool_nuggets)
    sim = [[similarity(vectors[i], vectors[j]) for j in range(n)] for i in range(n)]

    selected: list[int] = []
    remaining = list(range(n))
    eta_history: list[float] = []
    terminated_by = "exhausted"
    while remaining:
        best = None
        best_key = None
        best_kappa = 0.0
        for i in remaining:
            if selected:
                redundancy = sum(sim[i][j] for j in selected) / len(selected)
            else:
                redundancy = 0.0
            kappa = pool_nuggets[i].sim_to_fact - redundancy
            key = (-kappa, -pool_nuggets[i].sim_to_fact, pool_nuggets[i].doc_rank, pool_nuggets[i].sent_idx)
            if best_key is None or key < best_key:
                best, best_key, best_kappa = i, key, kappa
        pool_nuggets[best].kappa = best_kappa
        selected.append(best)
        remaining.remove(best)
        eta = nli.support(" ".join(pool_nuggets[i].text for i in selected), fact.text)
        eta_history.append(eta)
        if eta >= cfg.lambda_max:
            terminated_by = "eta_max"
            break
        if len(eta_history) >= 2 and eta_history[-1] - eta_history[-2] < cfg.lambda_min:
            terminated_by = "eta_gain"
            break
    return CandidatePool(
        selected=[pool_nuggets[i] for i in selected],
        eta_history=eta_history,
        terminated_by=terminated_by,
    )


def clean_nuggets(
    pool: CandidatePool,
    sample: Sample,
    cfg: SynthesisConfig,
    generator: GeneratorProvider,
) -> KseRecord:
    """Drop pool nuggets the generator does not credit for the golden answer.

    The first nugget is always retained. For each later nugget the raw score
    is the log-probability gain of the golden answer when that nugget alone
    is added to the question prompt; scores are normalized to sum to one and
    nuggets scoring below ``lambda_lm`` are dropped. A single-nugget pool, or
    a non-positive score sum, skips cleaning and keeps the pool unchanged.
    """
    if not pool.selected:
        raise PreconditionViolation("cannot clean an empty pool")
    answer = sample.golden_answers[0]
    n_refined = len(pool.selected)
    for nugget in pool.selected:
        nugget.kept = True
    if n_refined > 1:
        base_lp = generator.answer_logprob(answer_prompt(sample.question), answer)
        raw_scores = []
        for nugget in pool.selected[1:]:
            with_lp = generator.answer_logprob(answer_prompt(sample.question, nugget.text), answer)
            nugget.tau_raw = with_lp - base_lp
            raw_scores.append(nugget.tau_raw)
        total = sum(raw_scores)
        if total > 0:
            for nugget in pool.selected[1:]:
                nugget.tau = nugget.tau_raw / total
                nugget.kept = nugget.tau >= cfg.lambda_lm
    kept = [n for n in pool.selected if n.kept]
    kse_text = " ".join(n.text for n in kept)
    return KseRecord(
        sample_id=sample.id,
        fact=build_fact(sample),
        pool=pool,
        kse_text=kse_text,
        stats={
            "n_refined": n_refined,
            "n_cleaned": len(kept),
            "token_count": count_tokens(kse_text),
        },
    )


def synthesize_steps(
    sample: Sample,
    retrieved: RetrievedSet,
    cfg: SynthesisConfig,
    providers: ProviderBundle,
) -> tuple[Fact, NuggetSet, CandidatePool, KseRecord]:
    """Run extract -> refine -> clean, returning every intermediate."""
    try:
        fact = build_fact(sample)
    except KseError as exc:
        raise SynthesisError("build_fact", exc) from exc
    try:
        nugget_set = extract_nuggets(retrieved, fact, cfg, providers.embedder)
    except KseError as exc:
        raise SynthesisError("extract", exc) from exc
    try:
        pool = refine_nuggets(nugget_set, fact, cfg, providers.embedder, providers.nli)
    except KseError as exc:
        raise SynthesisError("refine", exc) from exc
    try:
        record = clean_nuggets(pool, sample, cfg, providers.generator)
    except KseError as exc:
        raise SynthesisError("clean", exc) from exc
    record.stats = {"n_extracted": len(nugget_set.nuggets), **record.stats}
    return fact, nugget_set, pool, record


def synthesize_kse(
    sample: Sample,
    retrieved: RetrievedSet,
    cfg: SynthesisConfig,
    providers: ProviderBundle,
) -> KseRecord:
    """Full synthesis for one sample; deterministic given deterministic providers."""
    _, _, _, record = synthesize_steps(sample, retrieved, cfg, providers)
    return record

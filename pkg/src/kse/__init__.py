"""Key-supporting-evidence toolkit for retrieval-augmented generation.

Synthesizes oracle evidence from (question, answer, retrieved documents)
triples, exports refiner training pairs, implements the preference-alignment
reward/advantage/loss math, and evaluates refined against unrefined prompts.
"""

from .alignment import (
    BanditSpec,
    PpoConfig,
    RewardInputs,
    Trajectory,
    compute_gae,
    entropy_bonus,
    ppo_clip_loss,
    step_reward,
    total_objective,
    train_toy_policy,
    value_loss,
)
from .corpus import Corpus, Document, Sample, Sentence, ingest_corpus, load_dataset
from .index import Bm25Index, RetrievedSet, build_index, retrieve_docs
from .metrics import MetricReport, accuracy, count_tokens, exact_match, normalize_text, token_f1
from .providers import (
    EmbeddingProvider,
    GeneratorProvider,
    HashEmbedder,
    MockGenerator,
    NliProvider,
    ProviderBundle,
    RecallNli,
    RefinerProvider,
    mock_providers,
)
from .segment import split_sentences
from .sft import SftPair, build_sft_pair, export_jsonl
from .synthesis import (
    CandidatePool,
    Fact,
    KseRecord,
    Nugget,
    NuggetSet,
    SynthesisConfig,
    build_fact,
    clean_nuggets,
    extract_nuggets,
    refine_nuggets,
    synthesize_kse,
    synthesize_steps,
)

__version__ = "0.1.0"

__all__ = [
    "BanditSpec", "PpoConfig", "RewardInputs", "Trajectory", "compute_gae",
    "entropy_bonus", "ppo_clip_loss", "step_reward", "total_objective",
    "train_toy_policy", "value_loss",
    "Corpus", "Document", "Sample", "Sentence", "ingest_corpus", "load_dataset",
    "Bm25Index", "RetrievedSet", "build_index", "retrieve_docs",
    "MetricReport", "accuracy", "count_tokens", "exact_match", "normalize_text", "token_f1",
    "EmbeddingProvider", "GeneratorProvider", "HashEmbedder", "MockGenerator",
    "NliProvider", "ProviderBundle", "RecallNli", "RefinerProvider", "mock_providers",
    "split_sentences",
    "SftPair", "build_sft_pair", "export_jsonl",
    "CandidatePool", "Fact", "KseRecord", "Nugget", "NuggetSet", "SynthesisConfig",
    "build_fact", "clean_nuggets", "extract_nuggets", "refine_nuggets",
    "synthesize_kse", "synthesize_steps",
    "__version__",
]

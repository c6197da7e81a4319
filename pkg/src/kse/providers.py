"""Model-scoring interfaces and their deterministic mock implementations.

Four capabilities back the pipeline: text embedding, NLI support scoring,
answer log-probability, and answer generation. The mocks are pure functions
of their inputs and are designed so every downstream algorithm has a
hand-computable expected output:

* mock embedder    - L2-normalized hashed bag of content words
* mock NLI         - content-word recall of the hypothesis in the premise
* mock generator   - planted-evidence lookup table
"""

import hashlib
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import PreconditionViolation
from .metrics import count_tokens

_TOKEN = re.compile(r"[a-z0-9]+")

# Function words ignored by the mock embedder and mock NLI scorer.
STOPWORDS = frozenset("""
a an the and or but if then else of in on at to from by with for as is are was
were be been being it its this that these those he she they them his her their
who whom whose which what when where why how do does did done not no nor so
such than too very can will would could should may might must shall has have
had having there here about into over under between during against
""".split())


def content_words(text: str) -> list[str]:
    """Lowercased word tokens with function words removed."""
    tokens = _TOKEN.findall(text.lower())
    words = [t for t in tokens if t not in STOPWORDS]
    return words if words else tokens


class EmbeddingProvider(ABC):
    """Maps texts to unit-norm vectors; cosine similarity is a dot product."""

    dim: int

    @abstractmethod
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class NliProvider(ABC):
    @abstractmethod
    def support(self, premise: str, hypothesis: str) -> float:
        """Degree in [0, 1] to which the premise entails the hypothesis."""


class GeneratorProvider(ABC):
    @abstractmethod
    def answer_logprob(self, prompt: str, answer: str) -> float:
        """Summed log-probability (<= 0) of the answer given the prompt."""

    @abstractmethod
    def generate_answer(self, prompt: str) -> str: ...


class RefinerProvider(ABC):
    @abstractmethod
    def refine(self, question: str, docs: Sequence[str]) -> str:
        """Condensed context; token count never exceeds the input's."""


class RerankerProvider(ABC):
    """Optional hook re-scoring first-stage retrieval candidates."""

    @abstractmethod
    def rescore(self, question: str, docs: Sequence) -> list[float]: ...


def similarity(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity of two unit vectors (plain dot product)."""
    return float(np.dot(u, v))


class HashEmbedder(EmbeddingProvider):
    """Deterministic bag-of-content-words embedder.

    Each content word hashes (blake2b) to one of ``dim`` buckets; the bucket
    counts form the vector, which is then L2-normalized. Token-multiset-equal
    texts therefore map to identical vectors.
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise PreconditionViolation("dim must be >= 1")
        self.dim = dim

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        out = []
        for text in texts:
            if not text:
                raise PreconditionViolation("cannot embed an empty text")
            vec = np.zeros(self.dim)
            words = content_words(text)
            if words:
                for tok in words:
                    vec[self._bucket(tok)] += 1.0
            else:
                vec[self._bucket(text)] = 1.0
            vec /= np.linalg.norm(vec)
            out.append(vec.tolist())
        return out


class RecallNli(NliProvider):
    """Support = fraction of the hypothesis' content words present in the premise."""

    def support(self, premise: str, hypothesis: str) -> float:
        if not premise or not hypothesis:
            raise PreconditionViolation("premise and hypothesis must be non-empty")
        hyp_words = set(content_words(hypothesis))
        premise_tokens = set(_TOKEN.findall(premise.lower()))
        if not hyp_words:
            return 0.0
        return len(hyp_words & premise_tokens) / len(hyp_words)


class MockGenerator(GeneratorProvider):
    """Planted-evidence lookup generator.

    ``evidence`` maps marker strings (typically evidence sentences) to the
    answer they support. ``generate_answer`` returns the answer of the marker
    appearing earliest in the prompt (ties broken by marker order), else
    ``default_answer``. ``answer_logprob`` returns ``present_logprob`` when
    any marker for that answer occurs in the prompt, else ``absent_logprob``,
    so adding irrelevant text never changes the score.
    """

    def __init__(
        self,
        evidence: Mapping[str, str] | Iterable[tuple[str, str]] = (),
        present_logprob: float = -1.0,
        absent_logprob: float = -5.0,
        default_answer: str = "unknown",
    ):
        self.markers: list[tuple[str, str]] = list(
            evidence.items() if isinstance(evidence, Mapping) else evidence
        )
        self.present_logprob = present_logprob
        self.absent_logprob = absent_logprob
        self.default_answer = default_answer

    def answer_logprob(self, prompt: str, answer: str) -> float:
        if not answer:
            raise PreconditionViolation("answer must be non-empty")
        for marker, marked_answer in self.markers:
            if marked_answer == answer and marker in prompt:
                return self.present_logprob
        return self.absent_logprob

    def generate_answer(self, prompt: str) -> str:
        if not prompt:
            raise PreconditionViolation("prompt must be non-empty")
        best_pos = len(prompt)
        best_answer = self.default_answer
        for marker, answer in self.markers:
            pos = prompt.find(marker)
            if 0 <= pos < best_pos:
                best_pos, best_answer = pos, answer
        return best_answer


class OverlapRefiner(RefinerProvider):
    """Keeps the top-k sentences by content-word overlap with the question."""

    def __init__(self, k_sent: int = 3):
        self.k_sent = k_sent

    def refine(self, question: str, docs: Sequence[str]) -> str:
        from .segment import split_sentences  # local import avoids a cycle at module load

        q_words = set(content_words(question))
        candidates = []
        for doc_rank, doc in enumerate(docs):
            for sent_idx, sent in enumerate(split_sentences(doc)):
                overlap = len(q_words & set(content_words(sent)))
                candidates.append((-overlap, doc_rank, sent_idx, sent))
        candidates.sort()
        kept = sorted(candidates[: self.k_sent], key=lambda c: (c[1], c[2]))
        text = " ".join(c[3] for c in kept)
        budget = count_tokens(" ".join(docs))
        tokens = text.split()
        return " ".join(tokens[:budget])


@dataclass
class ProviderBundle:
    """The provider set a pipeline run is wired with."""

    embedder: EmbeddingProvider
    nli: NliProvider
    generator: GeneratorProvider
    refiner: RefinerProvider | None = None


def mock_providers(
    evidence: Mapping[str, str] | Iterable[tuple[str, str]] = (),
    dim: int = 256,
) -> ProviderBundle:
    return ProviderBundle(
        embedder=HashEmbedder(dim=dim),
        nli=RecallNli(),
        generator=MockGenerator(evidence),
        refiner=OverlapRefiner(),
    )

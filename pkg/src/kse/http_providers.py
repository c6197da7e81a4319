"""HTTP-backed provider implementations.

Wire contract (JSON over POST):

* ``/embed``    {"texts": [...]}            -> {"vectors": [[...], ...]}
* ``/nli``      {"premise", "hypothesis"}   -> {"support": float}
* ``/logprob``  {"prompt", "answer"}        -> {"logprob": float}
* ``/generate`` {"prompt"}                  -> {"text": str}

Servers signal model failure with status 503 and ``{"error": str}``.
Transport failures and 5xx responses map to BackendUnavailable; calls are
idempotent model inferences, so they are retried with exponential backoff.
"""

import math
import os
import time
from typing import Sequence

import httpx

from .errors import BackendUnavailable, DimensionMismatch, PreconditionViolation
from .providers import EmbeddingProvider, GeneratorProvider, NliProvider

DEFAULT_TIMEOUT_MS = 30_000
NORM_TOLERANCE = 1e-4

RESPONSE_SCHEMAS = {
    "embed": {
        "type": "object",
        "required": ["vectors"],
        "properties": {
            "vectors": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}},
            }
        },
    },
    "nli": {
        "type": "object",
        "required": ["support"],
        "properties": {"support": {"type": "number", "minimum": 0, "maximum": 1}},
    },
    "logprob": {
        "type": "object",
        "required": ["logprob"],
        "properties": {"logprob": {"type": "number", "maximum": 0}},
    },
    "generate": {
        "type": "object",
        "required": ["text"],
        "properties": {"text": {"type": "string"}},
    },
}


def _timeout_s() -> float:
    return int(os.environ.get("KSE_HTTP_TIMEOUT_MS", DEFAULT_TIMEOUT_MS)) / 1000.0


class HttpClient:
    """Shared pooled client with retry + exponential backoff."""

    def __init__(self, pool_size: int = 8, retries: int = 2, backoff_s: float = 0.25):
        limits = httpx.Limits(max_connections=pool_size, max_keepalive_connections=pool_size)
        self._client = httpx.Client(limits=limits, timeout=_timeout_s())
        self.retries = retries
        self.backoff_s = backoff_s

    def post_json(self, url: str, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                response = self._client.post(url, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                try:
                    detail = response.json().get("error", "")
                except ValueError:
                    detail = response.text[:200]
                last_error = BackendUnavailable(f"{url} -> {response.status_code}: {detail}")
                continue
            if response.status_code != 200:
                raise BackendUnavailable(f"{url} -> {response.status_code}: {response.text[:200]}")
            try:
                return response.json()
            except ValueError as exc:
                raise BackendUnavailable(f"{url} returned non-JSON body") from exc
        raise BackendUnavailable(f"{url} unreachable after {self.retries + 1} attempt(s): {last_error}")

    def close(self) -> None:
        self._client.close()


class HttpEmbedder(EmbeddingProvider):
    """Embedding endpoint client.

    Vectors are validated for a consistent dimension and near-unit norm
    (within 1e-4, covering float32 serialization), then renormalized exactly
    so downstream cosine math sees true unit vectors.
    """

    def __init__(self, url: str, client: HttpClient, dim: int | None = None):
        self.url = url
        self.client = client
        self.dim = dim or 0

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if any(not t for t in texts):
            raise PreconditionViolation("cannot embed an empty text")
        data = self.client.post_json(self.url, {"texts": list(texts)})
        vectors = data.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise BackendUnavailable(f"{self.url} returned {len(vectors or [])} vectors for {len(texts)} texts")
        out = []
        for vec in vectors:
            if self.dim == 0:
                self.dim = len(vec)
            if len(vec) != self.dim:
                raise DimensionMismatch(f"expected dim {self.dim}, got {len(vec)}")
            norm = math.sqrt(sum(x * x for x in vec))
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise BackendUnavailable(f"{self.url} returned a non-unit vector (norm {norm:.6f})")
            out.append([x / norm for x in vec])
        return out


class HttpNli(NliProvider):
    def __init__(self, url: str, client: HttpClient):
        self.url = url
        self.client = client

    def support(self, premise: str, hypothesis: str) -> float:
        if not premise or not hypothesis:
            raise PreconditionViolation("premise and hypothesis must be non-empty")
        data = self.client.post_json(self.url, {"premise": premise, "hypothesis": hypothesis})
        support = data.get("support")
        if not isinstance(support, (int, float)) or not (0.0 <= support <= 1.0):
            raise BackendUnavailable(f"{self.url} returned invalid support {support!r}")
        return float(support)


class HttpGenerator(GeneratorProvider):
    def __init__(self, logprob_url: str, generate_url: str, client: HttpClient):
        self.logprob_url = logprob_url
        self.generate_url = generate_url
        self.client = client

    def answer_logprob(self, prompt: str, answer: str) -> float:
        if not answer:
            raise PreconditionViolation("answer must be non-empty")
        data = self.client.post_json(self.logprob_url, {"prompt": prompt, "answer": answer})
        logprob = data.get("logprob")
        if not isinstance(logprob, (int, float)) or not math.isfinite(logprob):
            raise BackendUnavailable(f"{self.logprob_url} returned invalid logprob {logprob!r}")
        return min(float(logprob), 0.0)

    def generate_answer(self, prompt: str) -> str:
        if not prompt:
            raise PreconditionViolation("prompt must be non-empty")
        data = self.client.post_json(self.generate_url, {"prompt": prompt})
        text = data.get("text")
        if not isinstance(text, str):
            raise BackendUnavailable(f"{self.generate_url} returned invalid text {text!r}")
        return text


def http_providers(endpoints: dict, pool_size: int = 8, retries: int = 2, backoff_s: float = 0.25):
    """Provider bundle backed by the four HTTP endpoints."""
    from .providers import ProviderBundle

    client = HttpClient(pool_size=pool_size, retries=retries, backoff_s=backoff_s)
    return ProviderBundle(
        embedder=HttpEmbedder(endpoints["embed"], client),
        nli=HttpNli(endpoints["nli"], client),
        generator=HttpGenerator(endpoints["logprob"], endpoints["generate"], client),
        refiner=None,
    )

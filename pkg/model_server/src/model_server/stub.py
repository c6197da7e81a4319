"""Deterministic stub backends.

Serve the full wire contract without any model weights: hashed-bag
embeddings, token-recall entailment, and overlap-based log-probabilities.
Used for development and for running the client integration suite in
environments where checkpoints are unavailable.
"""

import hashlib
import re

import numpy as np

from .backends import EmbedderBackend, GeneratorBackend, NliBackend, l2_normalize

_TOKEN = re.compile(r"[a-z0-9]+")

STOP = frozenset(
    "a an the and or of in on at to from by with for as is are was were be it "
    "this that who what which how do not no so there here".split()
)


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _content(text: str) -> list[str]:
    toks = _tokens(text)
    kept = [t for t in toks if t not in STOP]
    return kept or toks


class StubEmbedder(EmbedderBackend):
    dim = 64

    def embed(self, texts: list[str]) -> list[list[float]]:
        matrix = np.zeros((len(texts), self.dim))
        for row, text in enumerate(texts):
            words = _content(text)
            if words:
                for tok in words:
                    digest = hashlib.blake2b(tok.encode(), digest_size=8).digest()
                    matrix[row, int.from_bytes(digest, "big") % self.dim] += 1.0
            else:
                digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
                matrix[row, int.from_bytes(digest, "big") % self.dim] = 1.0
        return l2_normalize(matrix)


class StubNli(NliBackend):
    def support(self, premise: str, hypothesis: str) -> float:
        hyp = set(_content(hypothesis))
        if not hyp:
            return 0.0
        return len(hyp & set(_tokens(premise))) / len(hyp)


class StubGenerator(GeneratorBackend):
    def logprob(self, prompt: str, answer: str) -> float:
        prompt_tokens = set(_tokens(prompt))
        missing = sum(1 for tok in _content(answer) if tok not in prompt_tokens)
        return -1.0 - float(missing)

    def generate(self, prompt: str, temperature=None, top_k=None, top_p=None) -> str:
        tokens = _tokens(prompt)
        return " ".join(tokens[-4:]) if tokens else "empty"

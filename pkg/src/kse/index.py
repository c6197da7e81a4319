"""BM25 inverted index over a corpus, plus top-K document retrieval.

Parameters default to k1=0.9, b=0.4. The idf uses the non-negative
Lucene form ln(1 + (N - df + 0.5) / (df + 0.5)). Query terms are
deduplicated in first-occurrence order; documents sharing no query term
are never returned. The index is immutable once built.
"""

import logging
import math
import re
from dataclasses import dataclass, field

from .corpus import Corpus, Document
from .errors import EmptyCorpus, PreconditionViolation

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased, punctuation-stripped word tokens."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class RetrievedSet:
    """Top documents for one question, scores descending."""

    sample_id: str
    docs: tuple[Document, ...]
    scores: tuple[float, ...]
    requested_k: int

    def __post_init__(self):
        if any(a < b for a, b in zip(self.scores, self.scores[1:])):
            raise PreconditionViolation("retrieval scores must be non-increasing")

    @property
    def is_short(self) -> bool:
        return len(self.docs) < self.requested_k

    def to_record(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "docs": [{"id": d.id, "score": s} for d, s in zip(self.docs, self.scores)],
        }


class Bm25Index:
    """Inverted index with BM25 scoring; safe for concurrent reads."""

    def __init__(self, corpus: Corpus, k1: float = 0.9, b: float = 0.4):
        if len(corpus) == 0:
            raise EmptyCorpus("cannot index an empty corpus")
        self.corpus = corpus
        self.k1 = k1
        self.b = b
        self.doc_ids = [d.id for d in corpus.documents]
        self.doc_len: dict[str, int] = {}
        postings: dict[str, list[tuple[str, int]]] = {}
        for doc in corpus.documents:
            tokens = tokenize(doc.text)
            self.doc_len[doc.id] = len(tokens)
            counts: dict[str, int] = {}
            for tok in tokens:
                counts[tok] = counts.get(tok, 0) + 1
            for term, tf in counts.items():
                postings.setdefault(term, []).append((doc.id, tf))
        self.postings = {term: tuple(plist) for term, plist in postings.items()}
        self.n_docs = len(corpus)
        self.avgdl = sum(self.doc_len.values()) / self.n_docs
        self.idf = {
            term: math.log(1.0 + (self.n_docs - len(plist) + 0.5) / (len(plist) + 0.5))
            for term, plist in self.postings.items()
        }

    def score_all(self, question: str) -> dict[str, float]:
        """BM25 score for every document containing at least one query term."""
        seen: set[str] = set()
        terms = []
        for tok in tokenize(question):
            if tok not in seen:
                seen.add(tok)
                terms.append(tok)
        scores: dict[str, float] = {}
        for term in terms:
            plist = self.postings.get(term)
            if plist is None:
                continue
            idf = self.idf[term]
            for doc_id, tf in plist:
                dl = self.doc_len[doc_id]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
                scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (self.k1 + 1.0) / denom
        return scores


def build_index(corpus: Corpus, k1: float = 0.9, b: float = 0.4) -> Bm25Index:
    return Bm25Index(corpus, k1=k1, b=b)


def retrieve_docs(
    index: Bm25Index,
    question: str,
    top_k_docs: int = 5,
    sample_id: str = "",
    reranker=None,
    rerank_depth: int = 100,
) -> RetrievedSet:
    """Top-k documents by BM25 score, ties broken by ascending doc id.

    When a reranker hook is supplied, the top ``rerank_depth`` BM25 candidates
    are re-scored by ``reranker.rescore(question, docs)`` and the top-k of
    that ordering is returned instead.
    """
    if top_k_docs < 1:
        raise PreconditionViolation("top_k_docs must be >= 1")
    scores = index.score_all(question)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    if reranker is not None:
        candidates = [index.corpus.by_id[doc_id] for doc_id, _ in ranked[:rerank_depth]]
        rescored = reranker.rescore(question, candidates)
        ranked = sorted(
            ((doc.id, score) for doc, score in zip(candidates, rescored)),
            key=lambda item: (-item[1], item[0]),
        )
    top = ranked[:top_k_docs]
    if len(top) < top_k_docs:
        logger.warning(
            "query %r matched %d document(s), fewer than top_k_docs=%d",
            question[:60], len(top), top_k_docs,
        )
    return RetrievedSet(
        sample_id=sample_id,
        docs=tuple(index.corpus.by_id[doc_id] for doc_id, _ in top),
        scores=tuple(score for _, score in top),
        requested_k=top_k_docs,
    )

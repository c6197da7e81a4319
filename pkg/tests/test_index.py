import math
import random

import pytest

from kse.corpus import Corpus, Document
from kse.errors import EmptyCorpus, PreconditionViolation
from kse.index import build_index, retrieve_docs, tokenize


def oracle_rankings(docs: list[Document], query: str, k1=0.9, b=0.4):
    """Textbook BM25 over every document, full descending sort."""
    token_lists = {d.id: tokenize(d.text) for d in docs}
    n = len(docs)
    avgdl = sum(len(t) for t in token_lists.values()) / n
    df = {}
    for tokens in token_lists.values():
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    seen = set()
    terms = []
    for t in tokenize(query):
        if t not in seen:
            seen.add(t)
            terms.append(t)
    scored = []
    for d in docs:
        tokens = token_lists[d.id]
        dl = len(tokens)
        score = 0.0
        for term in terms:
            tf = tokens.count(term)
            if tf == 0 or term not in df:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
        if score > 0.0:
            scored.append((d.id, score))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return scored


def random_corpus(rng: random.Random, n_docs=20, vocab_size=40) -> Corpus:
    vocab = [f"w{i}" for i in range(vocab_size)]
    docs = []
    for i in range(n_docs):
        words = rng.choices(vocab, k=rng.randint(5, 30))
        docs.append(Document(id=f"d{i:02d}", title="", text=" ".join(words) + "."))
    return Corpus(docs)


def test_single_doc_unique_term():
    corpus = Corpus([Document(id="only", title="", text="zargle flemp.")])
    index = build_index(corpus)
    result = retrieve_docs(index, "zargle", 1)
    assert [d.id for d in result.docs] == ["only"]
    assert result.scores[0] > 0


def test_no_matching_term():
    corpus = Corpus([Document(id="a", title="", text="alpha beta.")])
    index = build_index(corpus)
    result = retrieve_docs(index, "missingword", 5)
    assert result.docs == ()
    assert result.is_short


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        build_index(Corpus([]))
    with pytest.raises(PreconditionViolation):
        corpus = Corpus([Document(id="a", title="", text="x.")])
        retrieve_docs(build_index(corpus), "x", 0)


def test_oracle_equivalence_random_corpora():
    rng = random.Random(7)
    for trial in range(10):
        corpus = random_corpus(rng)
        index = build_index(corpus)
        for _ in range(10):
            n_terms = rng.randint(1, 5)
            query = " ".join(rng.choices([f"w{i}" for i in range(45)], k=n_terms))
            expected = oracle_rankings(corpus.documents, query)
            for k in (1, 3, 50):
                got = retrieve_docs(index, query, k)
                assert [d.id for d in got.docs] == [doc_id for doc_id, _ in expected[:k]]
                assert list(got.scores) == [s for _, s in expected[:k]]


def test_oracle_equivalence_fixture_queries(mini_corpus, mini_samples):
    """Top-K equals the full-sort oracle on >= 100 random queries."""
    rng = random.Random(13)
    index = build_index(mini_corpus)
    vocab = sorted({t for d in mini_corpus.documents for t in tokenize(d.text)})
    queries = [s.question for s in mini_samples]
    queries += [" ".join(rng.choices(vocab, k=rng.randint(1, 6))) for _ in range(100)]
    for query in queries:
        expected = oracle_rankings(mini_corpus.documents, query)
        got = retrieve_docs(index, query, 5)
        assert [d.id for d in got.docs] == [doc_id for doc_id, _ in expected[:5]]


def test_tie_broken_by_ascending_id():
    docs = [
        Document(id="b", title="", text="same words here."),
        Document(id="a", title="", text="same words here."),
        Document(id="c", title="", text="other content entirely."),
    ]
    index = build_index(Corpus(docs))
    result = retrieve_docs(index, "same words", 2)
    assert [d.id for d in result.docs] == ["a", "b"]


def test_deterministic_across_rebuilds(mini_corpus):
    i1, i2 = build_index(mini_corpus), build_index(mini_corpus)
    for query in ("harbour storms", "festival anthem", "glacier"):
        r1 = retrieve_docs(i1, query, 5)
        r2 = retrieve_docs(i2, query, 5)
        assert r1.to_record() == r2.to_record()


def test_default_top_k_is_five(mini_index):
    result = retrieve_docs(mini_index, "breakwater harbour winter storms")
    assert result.requested_k == 5
    assert len(result.docs) == 5


def test_reranker_hook():
    class Reversing:
        def rescore(self, question, docs):
            return list(range(len(docs)))  # later BM25 candidates score higher

    docs = [Document(id=f"d{i}", title="", text=f"apple common w{i}.") for i in range(4)]
    index = build_index(Corpus(docs))
    plain = retrieve_docs(index, "apple common", 4)
    reranked = retrieve_docs(index, "apple common", 4, reranker=Reversing())
    assert [d.id for d in reranked.docs] == [d.id for d in reversed(plain.docs)]
    assert list(reranked.scores) == sorted(reranked.scores, reverse=True)


def test_scores_non_increasing(mini_index, mini_samples):
    for s in mini_samples[:10]:
        result = retrieve_docs(mini_index, s.question, 5)
        assert all(a >= b for a, b in zip(result.scores, result.scores[1:]))

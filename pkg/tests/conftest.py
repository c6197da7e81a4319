import pytest

from kse import fixtures
from kse.corpus import ingest_corpus, load_dataset
from kse.index import build_index, retrieve_docs
from kse.providers import mock_providers
from kse.synthesis import SynthesisConfig


@pytest.fixture(scope="session")
def mini_corpus():
    return ingest_corpus(fixtures.corpus_path())


@pytest.fixture(scope="session")
def mini_samples():
    return load_dataset(fixtures.dataset_path())


@pytest.fixture(scope="session")
def mini_index(mini_corpus):
    return build_index(mini_corpus)


@pytest.fixture(scope="session")
def syn_cfg():
    return SynthesisConfig()


@pytest.fixture(scope="session")
def mini_retrieved(mini_index, mini_samples, syn_cfg):
    return {
        s.id: retrieve_docs(mini_index, s.question, syn_cfg.top_k_docs, sample_id=s.id)
        for s in mini_samples
    }


@pytest.fixture(scope="session")
def mini_providers():
    return mock_providers(fixtures.evidence_markers())


@pytest.fixture(scope="session")
def evidence_info():
    return fixtures.evidence_map()["samples"]

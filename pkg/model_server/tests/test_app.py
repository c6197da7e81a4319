"""Wire-contract tests against the in-process app with stub backends."""

import math

import jsonschema
import pytest
from fastapi.testclient import TestClient

from model_server.app import create_app
from model_server.backends import Backends
from model_server.config import ServerConfig
from model_server.stub import StubEmbedder, StubGenerator, StubNli

RESPONSE_SCHEMAS = {
    "embed": {
        "type": "object",
        "required": ["vectors"],
        "properties": {
            "vectors": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
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


@pytest.fixture(scope="module")
def client():
    config = ServerConfig(backend="stub", max_batch_size=4)
    app = create_app(config)
    return TestClient(app)


@pytest.mark.parametrize(
    "route,payload",
    [
        ("embed", {"texts": ["alpha beta", "gamma"]}),
        ("nli", {"premise": "the cat sat", "hypothesis": "the cat sat"}),
        ("logprob", {"prompt": "Question: who?\nAnswer:", "answer": "nobody"}),
        ("generate", {"prompt": "continue this text"}),
    ],
)
def test_schema_conformance(client, route, payload):
    response = client.post(f"/{route}", json=payload)
    assert response.status_code == 200
    jsonschema.validate(response.json(), RESPONSE_SCHEMAS[route])


def test_embed_unit_norm_and_determinism(client):
    response = client.post("/embed", json={"texts": ["a", "a"]})
    u, v = response.json()["vectors"]
    assert u == v
    assert abs(math.sqrt(sum(x * x for x in u)) - 1.0) <= 1e-4


def test_embed_batching_equivalence_across_chunks(client):
    texts = [f"text number {i}" for i in range(9)]  # forces three chunks of <= 4
    batched = client.post("/embed", json={"texts": texts}).json()["vectors"]
    singles = [client.post("/embed", json={"texts": [t]}).json()["vectors"][0] for t in texts]
    assert batched == singles


def test_chunking_respects_max_batch_size():
    sizes = []

    class Spy(StubEmbedder):
        def embed(self, texts):
            sizes.append(len(texts))
            return super().embed(texts)

    config = ServerConfig(backend="stub", max_batch_size=3)
    backends = Backends(Spy(), StubNli(), StubGenerator(), config.roster())
    client = TestClient(create_app(config, backends))
    client.post("/embed", json={"texts": [f"t{i}" for i in range(8)]})
    assert sizes == [3, 3, 2]


def test_nli_self_support(client):
    support = client.post(
        "/nli", json={"premise": "rivers freeze", "hypothesis": "rivers freeze"}
    ).json()["support"]
    assert support >= 0.9


def test_nli_clamped_to_unit_interval():
    class Wild(StubNli):
        def support(self, premise, hypothesis):
            return 1.7

    config = ServerConfig(backend="stub")
    backends = Backends(StubEmbedder(), Wild(), StubGenerator(), config.roster())
    client = TestClient(create_app(config, backends))
    assert client.post("/nli", json={"premise": "p", "hypothesis": "h"}).json()["support"] == 1.0


def test_logprob_non_positive(client):
    value = client.post(
        "/logprob", json={"prompt": "some context", "answer": "unrelated answer"}
    ).json()["logprob"]
    assert value <= 0.0


def test_logprob_allows_empty_prompt(client):
    response = client.post("/logprob", json={"prompt": "", "answer": "word"})
    assert response.status_code == 200


def test_generate_greedy_deterministic(client):
    a = client.post("/generate", json={"prompt": "the same prompt twice"}).json()["text"]
    b = client.post("/generate", json={"prompt": "the same prompt twice"}).json()["text"]
    assert a == b


def test_generate_accepts_sampling_params(client):
    response = client.post(
        "/generate", json={"prompt": "with sampling", "temperature": 0.7, "top_k": 10, "top_p": 0.95}
    )
    assert response.status_code == 200


@pytest.mark.parametrize(
    "route,payload",
    [
        ("embed", {"texts": []}),
        ("embed", {"wrong_key": ["a"]}),
        ("nli", {"premise": "only premise"}),
        ("logprob", {"prompt": "p", "answer": ""}),
        ("generate", {}),
    ],
)
def test_schema_violations_return_400(client, route, payload):
    response = client.post(f"/{route}", json=payload)
    assert response.status_code == 400
    assert "error" in response.json()


def test_model_failure_returns_503():
    class Broken(StubEmbedder):
        def embed(self, texts):
            raise RuntimeError("weights corrupted")

    config = ServerConfig(backend="stub")
    backends = Backends(Broken(), StubNli(), StubGenerator(), config.roster())
    client = TestClient(create_app(config, backends))
    response = client.post("/embed", json={"texts": ["x"]})
    assert response.status_code == 503
    assert "weights corrupted" in response.json()["error"]


def test_healthz_roster(client):
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["models"]["backend"] == "stub"
    assert set(body["models"]) >= {"embedder", "nli", "generator"}


def test_config_validation():
    with pytest.raises(ValueError):
        ServerConfig(port=0)
    with pytest.raises(ValueError):
        ServerConfig(max_batch_size=0)
    with pytest.raises(ValueError):
        ServerConfig(backend="mystery")

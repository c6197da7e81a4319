"""HTTP provider behavior against a local canned-response server."""

import json
import math
import threading
from collections import defaultdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from kse.errors import BackendUnavailable, DimensionMismatch, PreconditionViolation
from kse.http_providers import HttpClient, HttpEmbedder, HttpGenerator, HttpNli


class Handler(BaseHTTPRequestHandler):
    hits = defaultdict(int)

    def log_message(self, *args):
        pass

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        route = self.path
        Handler.hits[route] += 1
        if route == "/embed":
            vecs = [[1.0, 0.0, 0.0] for _ in body["texts"]]
            return self._json(200, {"vectors": vecs})
        if route == "/embed_badnorm":
            return self._json(200, {"vectors": [[3.0, 4.0, 0.0]]})
        if route == "/embed_raggeddim":
            return self._json(200, {"vectors": [[1.0, 0.0], [1.0, 0.0, 0.0]]})
        if route == "/embed_f32":
            # float32-ish rounding: norm differs from 1 by ~1e-5
            v = [0.6000056, 0.8]
            return self._json(200, {"vectors": [v for _ in body["texts"]]})
        if route == "/nli":
            return self._json(200, {"support": 0.75})
        if route == "/logprob":
            return self._json(200, {"logprob": -2.5})
        if route == "/generate":
            return self._json(200, {"text": "echo: " + body["prompt"][:10]})
        if route == "/flaky":
            if Handler.hits[route] < 3:
                return self._json(503, {"error": "warming up"})
            return self._json(200, {"support": 0.5})
        if route == "/always503":
            return self._json(503, {"error": "model crashed"})
        if route == "/badjson":
            self.send_response(200)
            self.end_headers()
            self.wfile.write(b"not json at all")
            return
        return self._json(404, {"error": "no route"})

    def _json(self, status, payload):
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


@pytest.fixture(scope="module")
def server():
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()


@pytest.fixture()
def client():
    c = HttpClient(pool_size=2, retries=3, backoff_s=0.01)
    yield c
    c.close()


def test_embed_roundtrip(server, client):
    emb = HttpEmbedder(f"{server}/embed", client)
    vecs = emb.embed(["a", "b"])
    assert len(vecs) == 2
    assert all(abs(math.sqrt(sum(x * x for x in v)) - 1.0) < 1e-12 for v in vecs)
    assert emb.dim == 3


def test_embed_rejects_bad_norm(server, client):
    emb = HttpEmbedder(f"{server}/embed_badnorm", client)
    with pytest.raises(BackendUnavailable):
        emb.embed(["a"])


def test_embed_renormalizes_float32_noise(server, client):
    emb = HttpEmbedder(f"{server}/embed_f32", client)
    (vec,) = emb.embed(["a"])
    assert abs(math.sqrt(sum(x * x for x in vec)) - 1.0) <= 1e-12


def test_embed_dimension_mismatch(server, client):
    emb = HttpEmbedder(f"{server}/embed_raggeddim", client)
    with pytest.raises(DimensionMismatch):
        emb.embed(["a", "b"])


def test_embed_empty_text_rejected(server, client):
    with pytest.raises(PreconditionViolation):
        HttpEmbedder(f"{server}/embed", client).embed([""])


def test_nli_and_generator(server, client):
    assert HttpNli(f"{server}/nli", client).support("p", "h") == 0.75
    gen = HttpGenerator(f"{server}/logprob", f"{server}/generate", client)
    assert gen.answer_logprob("p", "a") == -2.5
    assert gen.generate_answer("hello world") == "echo: hello worl"


def test_retry_until_success(server, client):
    Handler.hits["/flaky"] = 0
    nli = HttpNli(f"{server}/flaky", client)
    assert nli.support("p", "h") == 0.5
    assert Handler.hits["/flaky"] == 3  # two 503s then success


def test_503_exhausts_retries(server, client):
    Handler.hits["/always503"] = 0
    nli = HttpNli(f"{server}/always503", client)
    with pytest.raises(BackendUnavailable) as err:
        nli.support("p", "h")
    assert "model crashed" in str(err.value)
    assert Handler.hits["/always503"] == 4  # initial call + 3 retries


def test_connection_refused_maps_to_backend_unavailable(client):
    nli = HttpNli("http://127.0.0.1:9/nli", client)
    with pytest.raises(BackendUnavailable):
        nli.support("p", "h")


def test_non_json_body(server, client):
    nli = HttpNli(f"{server}/badjson", client)
    with pytest.raises(BackendUnavailable):
        nli.support("p", "h")


def test_timeout_env_var(monkeypatch):
    monkeypatch.setenv("KSE_HTTP_TIMEOUT_MS", "1500")
    c = HttpClient()
    assert c._client.timeout.read == 1.5
    c.close()
    monkeypatch.delenv("KSE_HTTP_TIMEOUT_MS")
    c = HttpClient()
    assert c._client.timeout.read == 30.0
    c.close()

"""Run the client package's HTTP integration suite, unmodified, against a
live instance of this server (stub backends)."""

import os
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

CLIENT_TESTS = Path(__file__).resolve().parents[2] / "tests" / "test_http_integration.py"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_server():
    port = free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "model_server", "--backend", "stub", "--port", str(port)],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            if proc.poll() is not None:
                raise RuntimeError(proc.stdout.read().decode())
            try:
                if httpx.get(f"{url}/healthz", timeout=1.0).status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.1)
        else:
            raise RuntimeError("server never became healthy")
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_healthz(live_server):
    body = httpx.get(f"{live_server}/healthz").json()
    assert body["status"] == "ok"


@pytest.mark.skipif(not CLIENT_TESTS.exists(), reason="client package tests not present")
def test_client_integration_suite_passes_unmodified(live_server):
    env = dict(os.environ, KSE_SERVER_URL=live_server)
    result = subprocess.run(
        [sys.executable, "-m", "pytest", str(CLIENT_TESTS), "-v", "--no-header"],
        env=env,
        capture_output=True,
        text=True,
        timeout=300,
        cwd=CLIENT_TESTS.parents[1],
    )
    assert result.returncode == 0, result.stdout + result.stderr
    assert "skipped" not in result.stdout.splitlines()[-1]

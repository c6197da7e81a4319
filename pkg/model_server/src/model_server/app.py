"""FastAPI application implementing the four-endpoint wire contract.

Responses:
  POST /embed    {"texts": [...]}          -> {"vectors": [[...], ...]}
  POST /nli      {"premise","hypothesis"}  -> {"support": float in [0,1]}
  POST /logprob  {"prompt","answer"}       -> {"logprob": float <= 0}
  POST /generate {"prompt", sampling...}   -> {"text": str}
  GET  /healthz                            -> {"status","models"}

Schema violations return 400 with {"error": str}; backend failures return
503 with {"error": str}. Each backend is guarded by its own lock so one
slow model never corrupts another's state under concurrent requests.
"""

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backends import Backends, load_backends
from .config import ServerConfig


class EmbedRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class NliRequest(BaseModel):
    premise: str = Field(min_length=1)
    hypothesis: str = Field(min_length=1)


class LogprobRequest(BaseModel):
    prompt: str
    answer: str = Field(min_length=1)


class GenerateRequest(BaseModel):
    prompt: str = Field(min_length=1)
    temperature: float | None = None
    top_k: int | None = None
    top_p: float | None = None


def create_app(config: ServerConfig | None = None, backends: Backends | None = None) -> FastAPI:
    config = config or ServerConfig()
    if backends is None:
        backends = load_backends(config)
    app = FastAPI(title="kse-model-server")
    locks = {name: threading.Lock() for name in ("embedder", "nli", "generator")}

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    def guarded(name, func, *args, **kwargs):
        with locks[name]:
            return func(*args, **kwargs)

    @app.post("/embed")
    def embed(req: EmbedRequest):
        try:
            vectors = []
            for start in range(0, len(req.texts), config.max_batch_size):
                chunk = req.texts[start : start + config.max_batch_size]
                vectors.extend(guarded("embedder", backends.embedder.embed, chunk))
            return {"vectors": vectors}
        except Exception as exc:
            return JSONResponse(status_code=503, content={"error": f"embedder failed: {exc}"})

    @app.post("/nli")
    def nli(req: NliRequest):
        try:
            support = guarded("nli", backends.nli.support, req.premise, req.hypothesis)
            return {"support": max(0.0, min(1.0, float(support)))}
        except Exception as exc:
            return JSONResponse(status_code=503, content={"error": f"nli failed: {exc}"})

    @app.post("/logprob")
    def logprob(req: LogprobRequest):
        try:
            value = guarded("generator", backends.generator.logprob, req.prompt, req.answer)
            return {"logprob": min(0.0, float(value))}
        except Exception as exc:
            return JSONResponse(status_code=503, content={"error": f"logprob failed: {exc}"})

    @app.post("/generate")
    def generate(req: GenerateRequest):
        try:
            text = guarded(
                "generator", backends.generator.generate,
                req.prompt, req.temperature, req.top_k, req.top_p,
            )
            return {"text": text}
        except Exception as exc:
            return JSONResponse(status_code=503, content={"error": f"generate failed: {exc}"})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "models": backends.roster}

    return app


def serve(config: ServerConfig) -> None:
    """Load the backends and block serving the wire contract."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host="0.0.0.0", port=config.port, log_level="warning")

"""Server configuration."""

from dataclasses import dataclass


@dataclass(frozen=True)
class ServerConfig:
    embed_model: str = "intfloat/e5-base-v2"
    nli_model: str = "google/t5_xxl_true_nli_mixture"
    generator_model: str = "meta-llama/Llama-2-7b-hf"
    device: str = "cpu"
    port: int = 8601
    max_batch_size: int = 32
    backend: str = "transformers"  # transformers | stub
    max_new_tokens: int = 64

    def __post_init__(self):
        if not (0 < self.port < 65536):
            raise ValueError(f"invalid port {self.port}")
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
        if self.backend not in ("transformers", "stub"):
            raise ValueError(f"unknown backend {self.backend!r}")

    def roster(self) -> dict:
        return {
            "backend": self.backend,
            "embedder": self.embed_model,
            "nli": self.nli_model,
            "generator": self.generator_model,
            "device": self.device,
        }

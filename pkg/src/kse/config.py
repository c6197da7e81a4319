"""Pipeline configuration: one YAML file mirroring a fixed key tree.

Unknown keys are rejected. Precedence is command-line override > config file
> default. Every run writes the fully-resolved config beside its outputs so
runs can be reproduced from the echo alone.
"""

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .alignment import PpoConfig
from .errors import ConfigInvalid
from .synthesis import SynthesisConfig

DEFAULTS: dict[str, Any] = {
    "paths": {"corpus": None, "dataset": None, "output_dir": "out"},
    "retrieval": {"top_k_docs": 5},
    "synthesis": {"k_extract": 7, "lambda_max": 0.5, "lambda_min": 0.01, "lambda_lm": 0.05},
    "providers": {
        "mode": "mock",
        "endpoints": {"embed": None, "nli": None, "logprob": None, "generate": None},
        "pool_size": 8,
        "evidence_map": None,
        "embed_dim": 256,
        "retries": 2,
        "backoff_s": 0.25,
    },
    "ppo": {"epsilon": 0.2, "gamma": 1.0, "lambda_gae": 0.95, "entropy_coef": 0.01, "value_coef": 1.0},
    "eval": {"conditions": ["none", "full_docs", "clean_step"], "k_sent": 5, "workers": 1},
    "seed": 42,
}

LEAF_TYPES: dict[str, Any] = {
    "paths.corpus": "str?",
    "paths.dataset": "str?",
    "paths.output_dir": str,
    "retrieval.top_k_docs": int,
    "synthesis.k_extract": int,
    "synthesis.lambda_max": float,
    "synthesis.lambda_min": float,
    "synthesis.lambda_lm": float,
    "providers.mode": str,
    "providers.endpoints.embed": "str?",
    "providers.endpoints.nli": "str?",
    "providers.endpoints.logprob": "str?",
    "providers.endpoints.generate": "str?",
    "providers.pool_size": int,
    "providers.evidence_map": "str?",
    "providers.embed_dim": int,
    "providers.retries": int,
    "providers.backoff_s": float,
    "ppo.epsilon": float,
    "ppo.gamma": float,
    "ppo.lambda_gae": float,
    "ppo.entropy_coef": float,
    "ppo.value_coef": float,
    "eval.conditions": list,
    "eval.k_sent": int,
    "eval.workers": int,
    "seed": int,
}


def _check_unknown(data: dict, defaults: dict, prefix: str = "") -> None:
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigInvalid(dotted, "unknown key")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigInvalid(dotted, "expected a mapping")
            _check_unknown(value, defaults[key], prefix=dotted + ".")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _coerce_leaf(dotted: str, value: Any) -> Any:
    spec = LEAF_TYPES[dotted]
    if spec == "str?":
        if value is None:
            return None
        return str(value)
    if spec is list:
        if isinstance(value, str):
            return [v.strip() for v in value.split(",") if v.strip()]
        if not isinstance(value, list):
            raise ConfigInvalid(dotted, "expected a list")
        return [str(v) for v in value]
    if spec is int:
        if isinstance(value, bool) or (not isinstance(value, int) and not _intlike(value)):
            raise ConfigInvalid(dotted, f"expected an integer, got {value!r}")
        return int(value)
    if spec is float:
        if isinstance(value, bool):
            raise ConfigInvalid(dotted, f"expected a number, got {value!r}")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigInvalid(dotted, f"expected a number, got {value!r}") from None
    if spec is str:
        if not isinstance(value, str):
            raise ConfigInvalid(dotted, f"expected a string, got {value!r}")
        return value
    raise ConfigInvalid(dotted, "unsupported leaf type")


def _intlike(value: Any) -> bool:
    if isinstance(value, str):
        try:
            int(value)
            return True
        except ValueError:
            return False
    return False


def _validate_leaves(data: dict, prefix: str = "") -> None:
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            _validate_leaves(value, prefix=dotted + ".")
        else:
            data[key] = _coerce_leaf(dotted, value)


@dataclass
class PipelineConfig:
    data: dict

    @property
    def paths(self) -> dict:
        return self.data["paths"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def providers(self) -> dict:
        return self.data["providers"]

    @property
    def retrieval(self) -> dict:
        return self.data["retrieval"]

    @property
    def eval(self) -> dict:
        return self.data["eval"]

    def synthesis_config(self) -> SynthesisConfig:
        try:
            return SynthesisConfig(
                top_k_docs=self.data["retrieval"]["top_k_docs"], **self.data["synthesis"]
            )
        except Exception as exc:
            raise ConfigInvalid("synthesis", str(exc)) from exc

    def ppo_config(self) -> PpoConfig:
        try:
            return PpoConfig(**self.data["ppo"])
        except Exception as exc:
            raise ConfigInvalid("ppo", str(exc)) from exc

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=False)


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> PipelineConfig:
    """Build the resolved config from defaults, an optional file, and overrides.

    Overrides use dotted leaf keys, e.g. ``{"synthesis.k_extract": "5"}``.
    """
    merged = copy.deepcopy(DEFAULTS)
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigInvalid(str(path), "config root must be a mapping")
        _check_unknown(raw, DEFAULTS)
        merged = _merge(merged, raw)
    for dotted, value in (overrides or {}).items():
        if dotted not in LEAF_TYPES:
            raise ConfigInvalid(dotted, "unknown override key")
        node = merged
        *parents, leaf = dotted.split(".")
        for part in parents:
            node = node[part]
        node[leaf] = value
    _validate_leaves(merged)
    cfg = PipelineConfig(merged)
    cfg.synthesis_config()
    cfg.ppo_config()
    if merged["providers"]["mode"] not in ("mock", "http"):
        raise ConfigInvalid("providers.mode", "must be 'mock' or 'http'")
    if merged["providers"]["mode"] == "http":
        for name, url in merged["providers"]["endpoints"].items():
            if not url:
                raise ConfigInvalid(f"providers.endpoints.{name}", "required in http mode")
    return cfg


def write_echo(cfg: PipelineConfig, output_dir: str | Path) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo_path = out / "resolved_config.yaml"
    echo_path.write_text(cfg.to_yaml(), encoding="utf-8")
    return echo_path

"""Model backends.

``TransformersBackends`` loads real checkpoints (torch/transformers are
imported lazily so the package works without them installed). The embedder
mean-pools the last hidden state and L2-normalizes. The NLI scorer handles
both sequence-classification checkpoints (softmax entailment probability)
and TRUE-style seq2seq checkpoints (probability of the "1" verdict token).
Log-probabilities teacher-force the answer tokens and sum their
log-softmax scores; generation is greedy unless sampling is requested.
"""

from abc import ABC, abstractmethod

import numpy as np

from .config import ServerConfig


class EmbedderBackend(ABC):
    @abstractmethod
    def embed(self, texts: list[str]) -> list[list[float]]: ...


class NliBackend(ABC):
    @abstractmethod
    def support(self, premise: str, hypothesis: str) -> float: ...


class GeneratorBackend(ABC):
    @abstractmethod
    def logprob(self, prompt: str, answer: str) -> float: ...

    @abstractmethod
    def generate(self, prompt: str, temperature=None, top_k=None, top_p=None) -> str: ...


def l2_normalize(matrix: np.ndarray) -> list[list[float]]:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return (matrix / norms).tolist()


class TransformersEmbedder(EmbedderBackend):
    def __init__(self, model_id: str, device: str):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self.torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        self.device = device

    def embed(self, texts: list[str]) -> list[list[float]]:
        with self.torch.no_grad():
            enc = self.tokenizer(texts, padding=True, truncation=True, return_tensors="pt")
            enc = {k: v.to(self.device) for k, v in enc.items()}
            hidden = self.model(**enc).last_hidden_state
            mask = enc["attention_mask"].unsqueeze(-1).float()
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return l2_normalize(pooled.double().cpu().numpy())


class TransformersNli(NliBackend):
    def __init__(self, model_id: str, device: str):
        import torch
        from transformers import AutoConfig, AutoTokenizer

        self.torch = torch
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        cfg = AutoConfig.from_pretrained(model_id)
        self.seq2seq = bool(getattr(cfg, "is_encoder_decoder", False))
        if self.seq2seq:
            from transformers import AutoModelForSeq2SeqLM

            self.model = AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device).eval()
        else:
            from transformers import AutoModelForSequenceClassification

            self.model = AutoModelForSequenceClassification.from_pretrained(model_id).to(device).eval()
            labels = {v.lower(): k for k, v in cfg.id2label.items()}
            self.entail_idx = next(
                (idx for name, idx in labels.items() if "entail" in name), len(labels) - 1
            )

    def support(self, premise: str, hypothesis: str) -> float:
        with self.torch.no_grad():
            if self.seq2seq:
                # TRUE-style verdict: P("1") vs P("0") on the first decoded token
                enc = self.tokenizer(
                    f"premise: {premise} hypothesis: {hypothesis}",
                    return_tensors="pt", truncation=True,
                ).to(self.device)
                start = self.torch.tensor([[self.model.config.decoder_start_token_id]]).to(self.device)
                logits = self.model(**enc, decoder_input_ids=start).logits[0, 0]
                one = self.tokenizer("1", add_special_tokens=False).input_ids[0]
                zero = self.tokenizer("0", add_special_tokens=False).input_ids[0]
                pair = self.torch.softmax(logits[[zero, one]], dim=-1)
                return float(pair[1])
            enc = self.tokenizer(premise, hypothesis, return_tensors="pt", truncation=True).to(self.device)
            probs = self.torch.softmax(self.model(**enc).logits[0], dim=-1)
            return float(probs[self.entail_idx])


class TransformersGenerator(GeneratorBackend):
    def __init__(self, model_id: str, device: str, max_new_tokens: int = 64):
        import torch
        from transformers import AutoModelForCausalLM, AutoTokenizer

        self.torch = torch
        self.device = device
        self.max_new_tokens = max_new_tokens
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id).to(device).eval()

    def logprob(self, prompt: str, answer: str) -> float:
        with self.torch.no_grad():
            prompt_ids = self.tokenizer(prompt, return_tensors="pt").input_ids
            full_ids = self.tokenizer(prompt + " " + answer, return_tensors="pt").input_ids
            full_ids = full_ids.to(self.device)
            n_prompt = prompt_ids.shape[1]
            logits = self.model(full_ids).logits[0]
            logps = self.torch.log_softmax(logits, dim=-1)
            total = 0.0
            for pos in range(n_prompt, full_ids.shape[1]):
                total += float(logps[pos - 1, full_ids[0, pos]])
        return min(total, 0.0)

    def generate(self, prompt: str, temperature=None, top_k=None, top_p=None) -> str:
        with self.torch.no_grad():
            enc = self.tokenizer(prompt, return_tensors="pt").to(self.device)
            kwargs = {"max_new_tokens": self.max_new_tokens, "do_sample": False}
            if temperature is not None and temperature > 0:
                kwargs.update(do_sample=True, temperature=temperature)
                if top_k is not None:
                    kwargs["top_k"] = top_k
                if top_p is not None:
                    kwargs["top_p"] = top_p
            out = self.model.generate(**enc, **kwargs)
        text = self.tokenizer.decode(out[0][enc["input_ids"].shape[1]:], skip_special_tokens=True)
        return text.strip()


class Backends:
    """The three loaded backends plus the roster they were built from."""

    def __init__(self, embedder: EmbedderBackend, nli: NliBackend, generator: GeneratorBackend,
                 roster: dict):
        self.embedder = embedder
        self.nli = nli
        self.generator = generator
        self.roster = roster


def load_backends(config: ServerConfig) -> Backends:
    if config.backend == "stub":
        from .stub import StubEmbedder, StubGenerator, StubNli

        return Backends(StubEmbedder(), StubNli(), StubGenerator(), config.roster())
    return Backends(
        TransformersEmbedder(config.embed_model, config.device),
        TransformersNli(config.nli_model, config.device),
        TransformersGenerator(config.generator_model, config.device, config.max_new_tokens),
        config.roster(),
    )

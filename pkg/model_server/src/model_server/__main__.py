import argparse

from .app import serve
from .config import ServerConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kse-model-server", description="Serve the model endpoints")
    defaults = ServerConfig()
    parser.add_argument("--embed-model", default=defaults.embed_model)
    parser.add_argument("--nli-model", default=defaults.nli_model)
    parser.add_argument("--generator-model", default=defaults.generator_model)
    parser.add_argument("--device", default=defaults.device)
    parser.add_argument("--port", type=int, default=defaults.port)
    parser.add_argument("--max-batch-size", type=int, default=defaults.max_batch_size)
    parser.add_argument("--backend", choices=["transformers", "stub"], default=defaults.backend)
    parser.add_argument("--max-new-tokens", type=int, default=defaults.max_new_tokens)
    args = parser.parse_args(argv)
    serve(
        ServerConfig(
            embed_model=args.embed_model,
            nli_model=args.nli_model,
            generator_model=args.generator_model,
            device=args.device,
            port=args.port,
            max_batch_size=args.max_batch_size,
            backend=args.backend,
            max_new_tokens=args.max_new_tokens,
        )
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

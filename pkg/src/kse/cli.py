"""Command-line interface.

One structured YAML config drives every subcommand; any leaf key can be
overridden with ``--section.key value`` flags. Exit codes: 0 success,
1 invalid configuration or input, 2 runtime failure.
"""

import argparse
import csv
import sys
from pathlib import Path

from . import fixtures
from .alignment import TRACE_HEADER, BanditSpec, RewardInputs, step_reward, train_toy_policy
from .config import LEAF_TYPES, PipelineConfig, load_config, write_echo
from .corpus import ingest_corpus, load_dataset
from .errors import ConfigInvalid, KseError
from .evalharness import Condition, compare_report, run_condition
from .http_providers import http_providers
from .index import build_index, retrieve_docs
from .jsonl import read_jsonl, write_jsonl
from .providers import ProviderBundle, mock_providers
from .sft import DEFAULT_SEPARATOR, build_sft_pair, export_jsonl
from .synthesis import synthesize_kse


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to the pipeline YAML config")
    parser.add_argument("--seed", type=int, help="seed for all randomness")
    parser.add_argument("--providers", choices=["mock", "http"], help="provider mode")
    parser.add_argument("--workers", type=int, help="evaluation worker bound")
    for dotted in LEAF_TYPES:
        if dotted == "seed":  # covered by the explicit --seed flag
            continue
        parser.add_argument(f"--{dotted}", dest=f"set_{dotted}", metavar="V", help=argparse.SUPPRESS)


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    for dotted in LEAF_TYPES:
        value = getattr(args, f"set_{dotted}", None)
        if value is not None:
            overrides[dotted] = value
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.providers is not None:
        overrides["providers.mode"] = args.providers
    if args.workers is not None:
        overrides["eval.workers"] = args.workers
    return overrides


def _load(args: argparse.Namespace) -> PipelineConfig:
    if args.config is not None and not Path(args.config).exists():
        raise ConfigInvalid(args.config, "config file not found")
    return load_config(args.config, _collect_overrides(args))


def _providers(cfg: PipelineConfig) -> ProviderBundle:
    p = cfg.providers
    if p["mode"] == "http":
        return http_providers(
            p["endpoints"], pool_size=p["pool_size"], retries=p["retries"], backoff_s=p["backoff_s"]
        )
    markers = []
    if p["evidence_map"]:
        markers = fixtures.evidence_markers(p["evidence_map"])
    return mock_providers(markers, dim=p["embed_dim"])


def _require_path(cfg: PipelineConfig, key: str) -> Path:
    value = cfg.paths.get(key)
    if not value:
        raise ConfigInvalid(f"paths.{key}", "required for this subcommand")
    path = Path(value)
    if not path.exists():
        raise ConfigInvalid(f"paths.{key}", f"no such file: {path}")
    return path


def _corpus_and_retrievals(cfg: PipelineConfig):
    corpus = ingest_corpus(_require_path(cfg, "corpus"))
    samples = load_dataset(_require_path(cfg, "dataset"))
    index = build_index(corpus)
    top_k = cfg.retrieval["top_k_docs"]
    retrieved = {
        s.id: retrieve_docs(index, s.question, top_k, sample_id=s.id) for s in samples
    }
    return corpus, samples, retrieved


def cmd_index(cfg: PipelineConfig, args) -> int:
    corpus = ingest_corpus(_require_path(cfg, "corpus"))
    index = build_index(corpus)
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    n_sentences = sum(len(s) for s in corpus.sentences.values())
    print(f"indexed {index.n_docs} documents, {len(index.postings)} terms, "
          f"{n_sentences} sentences, avgdl {index.avgdl:.1f}")
    return 0


def cmd_retrieve(cfg: PipelineConfig, args) -> int:
    _, samples, retrieved = _corpus_and_retrievals(cfg)
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    count = write_jsonl(out / "retrieval.jsonl", (retrieved[s.id].to_record() for s in samples))
    print(f"wrote {count} retrieval records to {out / 'retrieval.jsonl'}")
    return 0


def cmd_synthesize(cfg: PipelineConfig, args) -> int:
    _, samples, retrieved = _corpus_and_retrievals(cfg)
    providers = _providers(cfg)
    syn_cfg = cfg.synthesis_config()
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    records = (
        synthesize_kse(s, retrieved[s.id], syn_cfg, providers).to_record() for s in samples
    )
    count = write_jsonl(out / "kse.jsonl", records)
    print(f"wrote {count} KSE records to {out / 'kse.jsonl'}")
    return 0


def cmd_export_sft(cfg: PipelineConfig, args) -> int:
    _, samples, retrieved = _corpus_and_retrievals(cfg)
    providers = _providers(cfg)
    syn_cfg = cfg.synthesis_config()
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    pairs = []
    for sample in samples:
        record = synthesize_kse(sample, retrieved[sample.id], syn_cfg, providers)
        pairs.append(build_sft_pair(sample, retrieved[sample.id], record, separator=args.separator))
    count = export_jsonl(pairs, out / "sft.jsonl")
    print(f"wrote {count} SFT pairs to {out / 'sft.jsonl'}")
    return 0


def cmd_reward(cfg: PipelineConfig, args) -> int:
    answers_path = Path(args.answers)
    if not answers_path.exists():
        raise ConfigInvalid("answers", f"no such file: {answers_path}")
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    rows = []
    for _, record in read_jsonl(answers_path):
        inputs = RewardInputs(
            a_pred=record["a_pred"],
            a_ori=record["a_ori"],
            golden=tuple(record["golden_answers"]),
        )
        rows.append({"sample_id": record["sample_id"], "reward": step_reward(inputs, is_eof=True)})
    count = write_jsonl(out / "rewards.jsonl", rows)
    print(f"wrote {count} rewards to {out / 'rewards.jsonl'}")
    return 0


def cmd_toy_ppo(cfg: PipelineConfig, args) -> int:
    env = BanditSpec(n_arms=args.arms, n_contexts=args.contexts, zero_reward=args.zero_reward)
    trace = train_toy_policy(
        env, cfg.ppo_config(), seed=cfg.seed, updates=args.updates, batch_size=args.batch,
        value_target=args.value_target,
    )
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    trace_path = out / "ppo_trace.csv"
    with open(trace_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        writer.writerows(row.as_csv_row() for row in trace)
    print(f"final P(correct arm) = {trace[-1].p_correct:.4f} ({trace_path})")
    return 0


def cmd_evaluate(cfg: PipelineConfig, args) -> int:
    condition_names = cfg.eval["conditions"]
    if not condition_names:
        raise ConfigInvalid("eval.conditions", "no conditions")
    conditions = [Condition.parse(name) for name in condition_names]
    _, samples, retrieved = _corpus_and_retrievals(cfg)
    providers = _providers(cfg)
    syn_cfg = cfg.synthesis_config()
    out = Path(cfg.paths["output_dir"])
    write_echo(cfg, out)
    results = [
        run_condition(
            samples, retrieved, condition, providers, syn_cfg,
            k_sent=cfg.eval["k_sent"], workers=cfg.eval["workers"],
        )
        for condition in conditions
    ]
    table, records = compare_report(results)
    write_jsonl(out / "report.jsonl", records)
    print(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    commands = {
        "index": cmd_index,
        "retrieve": cmd_retrieve,
        "synthesize": cmd_synthesize,
        "export-sft": cmd_export_sft,
        "reward": cmd_reward,
        "toy-ppo": cmd_toy_ppo,
        "evaluate": cmd_evaluate,
    }
    for name, func in commands.items():
        sp = sub.add_parser(name)
        _add_common(sp)
        sp.set_defaults(func=func)
        if name == "export-sft":
            sp.add_argument("--separator", default=DEFAULT_SEPARATOR)
        elif name == "reward":
            sp.add_argument("--answers", required=True, help="JSONL with a_pred/a_ori/golden_answers")
        elif name == "toy-ppo":
            sp.add_argument("--updates", type=int, default=2000)
            sp.add_argument("--arms", type=int, default=5)
            sp.add_argument("--contexts", type=int, default=3)
            sp.add_argument("--batch", type=int, default=16)
            sp.add_argument("--zero-reward", action="store_true")
            sp.add_argument("--value-target", choices=["gae_return", "reward"],
                            default="gae_return")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except (ConfigInvalid, KseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(cfg, args)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, index, filter, features,
train, rank, eval, ablate) plus ``serve`` for the curation service. Each
stage reads the shared JSON config; ``--seed``, ``--threads``, and ``--out``
override the corresponding config entries. Outputs are deterministic given
the same config and seed.
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline
from .errors import ConfigError, MissingInput, SynrankError


def _add_common(sub):
    sub.add_argument("--config", required=True, help="pipeline config JSON")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    sub.add_argument("--out", default=None, help="override the output directory")


def _load_cfg(args) -> pipeline.PipelineConfig:
    overrides = {"seed": args.seed, "threads": args.threads, "out_dir": args.out}
    cfg = pipeline.load_config(args.config, overrides)
    pipeline.validate_input_paths(cfg)
    return cfg


def cmd_ingest(args):
    written = pipeline.cmd_ingest(_load_cfg(args))
    for path in written:
        print(f"ingested {path}")
    return 0


def cmd_index(args):
    cfg = _load_cfg(args)
    index = pipeline.cmd_index(cfg)
    print(f"indexed {len(index.vocab)} terms, {index.window.total_windows} windows -> {cfg.path('stats.idx')}")
    return 0


def cmd_filter(args):
    cfg = _load_cfg(args)
    pool = pipeline.cmd_filter(cfg)
    print(f"kept {len(pool)} candidates -> {cfg.path('candidates.txt')}")
    return 0


def cmd_features(args):
    cfg = _load_cfg(args)
    out = pipeline.cmd_features(cfg)
    print(f"wrote feature dump -> {out}")
    return 0


def cmd_train(args):
    cfg = _load_cfg(args)
    trained = pipeline.cmd_train(cfg)
    print(f"trained {len(trained)} fold models -> {cfg.path('models')}")
    return 0


def cmd_rank(args):
    cfg = _load_cfg(args)
    written = pipeline.cmd_rank(cfg)
    for method, path in written.items():
        print(f"ranked {method} -> {path}")
    return 0


def cmd_eval(args):
    cfg = _load_cfg(args)
    report = pipeline.cmd_eval(cfg)
    for row in report.rows:
        n = "" if row.n is None else f"@{row.n}"
        print(f"{row.method} {row.metric}{n} = {row.value:.4f}")
    print(f"wrote {cfg.path('report.tsv')} and {cfg.path('report.json')}")
    return 0


def cmd_ablate(args):
    cfg = _load_cfg(args)
    report = pipeline.cmd_ablate(cfg, args.mode)
    for row in report.rows:
        print(f"{row.method} {row.metric} feature={row.feature} = {row.value:.4f}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .curation import CurationStore
    from .server import create_app

    store = CurationStore.from_run_file(args.run, args.log)
    app = create_app(store, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synrank",
        description="Rank domain-specific synonym candidates and curate a thesaurus.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    stages = {
        "ingest": (cmd_ingest, "normalize corpora into the annotated TSV format"),
        "index": (cmd_index, "build the statistics index and random-index model"),
        "filter": (cmd_filter, "apply candidate frequency filters"),
        "features": (cmd_features, "extract the 8-feature vectors for training pairs"),
        "train": (cmd_train, "train per-fold logistic-regression and LambdaMART models"),
        "rank": (cmd_rank, "write per-method ranked run files"),
        "eval": (cmd_eval, "run the TOEFL-style and relevance-ranking evaluations"),
    }
    for name, (func, help_text) in stages.items():
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)
        sub.set_defaults(func=func)

    ablate = subs.add_parser("ablate", help="per-feature ablation (MAP@150)")
    _add_common(ablate)
    ablate.add_argument("--mode", choices=("single", "leave_one_out"), default="single")
    ablate.set_defaults(func=cmd_ablate)

    serve = subs.add_parser("serve", help="serve ranked lists to a human editor")
    serve.add_argument("--run", required=True, help="run file with the rankings to curate")
    serve.add_argument("--log", required=True, help="append-only decision log path")
    serve.add_argument("--static", default=None, help="directory of UI static files")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8008)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SynrankError as exc:
        category = type(exc).__name__
        print(f"error category={category} message={exc}", file=sys.stderr)
        return 2 if isinstance(exc, (MissingInput, ConfigError)) else 1


if __name__ == "__main__":
    sys.exit(main())

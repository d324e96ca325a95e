"""Command-line interface covering the full pipeline.

Subcommands: validate, embed, similar, matrix, common-features, serve.
Reports go to stdout and diagnostics to stderr so the commands compose in
shell pipelines. Exit codes are a stable contract: 0 success, 1 domain
error, 2 I/O or usage error, 3 empty-result conditions.

An optional JSON config file (--config) mirrors the long flag names;
explicit flags win over config values. DXSIM_ENDPOINT is the fallback for
--endpoint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from dxsim import analysis, corpus as corpus_mod
from dxsim.embedding import EmbeddingBackendConfig, EmbeddingCache, embed_corpus
from dxsim.errors import DxsimError, EmptyCandidatePool
from dxsim.preprocess import DEFAULT_CONFIG, StopwordList, preprocess
from dxsim.report import format_score, render_report
from dxsim.service import (
    DEFAULT_FEATURE_COUNT,
    DEFAULT_K,
    build_similar_report,
    build_state_from_paths,
    create_app,
)
from dxsim.similarity import SimilarityFilters, similarity_matrix

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_EMPTY = 3


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    # Required, but enforced after the config file merges (see _require) so a
    # config file can supply it.
    p.add_argument("--corpus", default=None, help="path to the JSONL corpus file")
    p.add_argument("--stopwords", default=None, help="stopword file (one token per line, # comments)")


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("hashed", "remote"), default="hashed")
    p.add_argument("--dim", type=int, default=256, help="embedding dimension")
    p.add_argument("--seed", type=int, default=42, help="hashed backend seed")
    p.add_argument("--endpoint", default=None, help="remote backend URL (or DXSIM_ENDPOINT)")
    p.add_argument("--model", default=None, help="remote backend model name")
    p.add_argument("--timeout", type=float, default=10.0, help="remote request timeout, seconds")
    p.add_argument("--cache", default=None, help="embedding cache file (JSONL)")
    p.add_argument(
        "--embed-uses-preprocessed",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="embed stopword-filtered tokens instead of the raw normalized text",
    )


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--exclude-company-of-target",
        action=argparse.BooleanOptionalAction,
        default=True,
    )
    p.add_argument(
        "--exclude-same-sub-industry",
        action=argparse.BooleanOptionalAction,
        default=True,
    )
    p.add_argument(
        "--exclude-same-industry",
        action=argparse.BooleanOptionalAction,
        default=False,
    )
    p.add_argument("--min-score", type=float, default=None)
    p.add_argument("--years", default=None, help="comma-separated allowed report years")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dxsim", description="Cross-domain case similarity engine")
    parser.add_argument("--config", default=None, help="JSON file mirroring long flag names")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file and report problems")
    _add_corpus_flags(p)

    p = sub.add_parser("embed", help="embed every document into the cache file")
    _add_corpus_flags(p)
    _add_backend_flags(p)
    p.add_argument("--parallelism", type=int, default=1)

    p = sub.add_parser("similar", help="rank the cases most similar to a target case")
    _add_corpus_flags(p)
    _add_backend_flags(p)
    _add_filter_flags(p)
    p.add_argument("--target", default=None, help="target document id")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="number of matches to return")
    p.add_argument("--features", type=int, default=DEFAULT_FEATURE_COUNT, help="shared terms per match")
    p.add_argument("--format", choices=("text", "json", "markdown"), default="text")

    p = sub.add_parser("matrix", help="full pairwise similarity matrix")
    _add_corpus_flags(p)
    _add_backend_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("common-features", help="shared salient terms of two cases")
    _add_corpus_flags(p)
    p.add_argument("--a", default=None, dest="doc_a", help="first document id")
    p.add_argument("--b", default=None, dest="doc_b", help="second document id")
    p.add_argument("--n", type=int, default=DEFAULT_FEATURE_COUNT)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_corpus_flags(p)
    _add_backend_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8237)
    p.add_argument("--static-dir", default=None, help="directory with the built UI")
    p.add_argument("--cors-origin", action="append", default=None)
    p.add_argument("--parallelism", type=int, default=1)

    return parser


# Flags that must be present once the command line and config are merged.
_REQUIRED_FLAGS = {
    "validate": {"corpus": "--corpus"},
    "embed": {"corpus": "--corpus"},
    "similar": {"corpus": "--corpus", "target": "--target"},
    "matrix": {"corpus": "--corpus"},
    "common-features": {"corpus": "--corpus", "doc_a": "--a", "doc_b": "--b"},
    "serve": {"corpus": "--corpus"},
}

# Config keys whose argparse dest differs from the flag name.
_CONFIG_ALIASES = {"a": "doc_a", "b": "doc_b"}


def _apply_config_file(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Fill unset flags from the config file; explicit flags win."""
    if not args.config:
        return
    with open(args.config, encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        parser.error(f"config file {args.config} must hold a JSON object")
    known = set(vars(args))
    for key, value in values.items():
        dest = key.replace("-", "_")
        dest = _CONFIG_ALIASES.get(dest, dest)
        if dest in ("command", "config"):
            parser.error(f"config file may not set {key!r}")
        if dest not in known:
            continue  # flag belongs to another subcommand
        if dest in _explicit_dests:
            continue  # flag given on the command line
        setattr(args, dest, value)


def _require(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    for dest, flag in _REQUIRED_FLAGS[args.command].items():
        if not getattr(args, dest):
            parser.error(f"{args.command} requires {flag} (flag or config file)")


# Tracks which dests were explicitly provided, so config values do not
# override them. Populated per invocation in main().
_explicit_dests: set[str] = set()


def _collect_explicit_dests(argv: Sequence[str], parser: argparse.ArgumentParser) -> set[str]:
    """Best-effort scan of argv for long flags to know what the user set."""
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            name = token[2:].split("=", 1)[0]
            explicit.add(name.replace("-", "_"))
            if name.startswith("no-"):
                explicit.add(name[3:].replace("-", "_"))
    return explicit


def _backend_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> EmbeddingBackendConfig:
    if args.backend == "remote":
        endpoint = args.endpoint or os.environ.get("DXSIM_ENDPOINT")
        if not endpoint:
            parser.error("remote backend requires --endpoint (or DXSIM_ENDPOINT)")
        if not args.model:
            parser.error("remote backend requires --model")
        return EmbeddingBackendConfig(
            kind="remote", dim=args.dim, endpoint=endpoint, model_name=args.model, timeout=args.timeout
        )
    if args.endpoint or args.model:
        parser.error("--endpoint/--model only apply to the remote backend")
    return EmbeddingBackendConfig(kind="hashed", dim=args.dim, seed=args.seed)


def _filters(args: argparse.Namespace, parser: argparse.ArgumentParser) -> SimilarityFilters:
    years = None
    if args.years is not None:
        raw = args.years if isinstance(args.years, list) else str(args.years).split(",")
        try:
            years = frozenset(int(y) for y in raw)
        except ValueError:
            parser.error(f"--years must be comma-separated integers, got {args.years!r}")
    try:
        return SimilarityFilters(
            exclude_company_of_target=args.exclude_company_of_target,
            exclude_same_sub_industry=args.exclude_same_sub_industry,
            exclude_same_industry=args.exclude_same_industry,
            min_score=args.min_score,
            allowed_years=years,
        )
    except ValueError as exc:
        parser.error(str(exc))


def _state(args: argparse.Namespace, parser: argparse.ArgumentParser, parallelism: int = 1):
    backend = _backend_config(args, parser)
    return build_state_from_paths(
        corpus_path=args.corpus,
        backend=backend,
        cache_path=args.cache,
        stopwords_path=args.stopwords,
        parallelism=parallelism,
        embed_uses_preprocessed=args.embed_uses_preprocessed,
    )


def cmd_validate(args, parser) -> int:
    with open(args.corpus, "rb") as fh:
        valid, diagnostics = corpus_mod.validate_lines(fh)
    for line in diagnostics:
        print(line, file=sys.stderr)
    if diagnostics:
        print(f"{args.corpus}: INVALID ({len(diagnostics)} problem(s))")
        return EXIT_DOMAIN
    print(f"{args.corpus}: {valid} documents OK")
    return EXIT_OK


def cmd_embed(args, parser) -> int:
    if not args.cache:
        parser.error("embed requires --cache")
    backend = _backend_config(args, parser)
    loaded = corpus_mod.load_corpus(args.corpus)
    cache = EmbeddingCache(args.cache)
    before = len(cache)
    stopwords = StopwordList.load(args.stopwords) if args.stopwords else None
    embed_corpus(
        backend,
        loaded,
        cache=cache,
        stopwords=stopwords,
        use_preprocessed=args.embed_uses_preprocessed,
        parallelism=args.parallelism,
    )
    fresh = len(cache) - before
    print(
        f"embedded {len(loaded)} documents ({len(loaded) - fresh} cache hits, {fresh} new) -> {args.cache}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_similar(args, parser) -> int:
    state = _state(args, parser)
    filters = _filters(args, parser)
    report = build_similar_report(state, args.target, args.k, args.features, filters)
    sys.stdout.write(render_report(report, args.format).decode("utf-8"))
    return EXIT_OK


def cmd_matrix(args, parser) -> int:
    state = _state(args, parser)
    matrix = similarity_matrix(state.embeddings)
    if args.format == "json":
        payload = {"ids": list(matrix.ids), "scores": [list(row) for row in matrix.values]}
        sys.stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")
        return EXIT_OK
    out = sys.stdout
    out.write("id," + ",".join(matrix.ids) + "\n")
    for i, doc_id in enumerate(matrix.ids):
        out.write(doc_id + "," + ",".join(format_score(v) for v in matrix.values[i]) + "\n")
    return EXIT_OK


def cmd_common_features(args, parser) -> int:
    loaded = corpus_mod.load_corpus(args.corpus)
    stopwords = StopwordList.load(args.stopwords) if args.stopwords else StopwordList.builtin()
    term_store = {doc.id: analysis.extract_terms(preprocess(doc, DEFAULT_CONFIG, stopwords)) for doc in loaded}
    overlap = analysis.common_features(args.doc_a, args.doc_b, loaded, term_store, args.n)
    if args.format == "json":
        payload = {
            "doc_a": overlap.doc_a,
            "doc_b": overlap.doc_b,
            "shared_terms": [{"term": t.term, "weight": t.weight} for t in overlap.shared_terms],
            "jaccard": overlap.jaccard,
        }
        # Compact separators match the HTTP response encoding byte-for-byte.
        sys.stdout.write(json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n")
        return EXIT_OK
    print(f"shared terms of {overlap.doc_a} and {overlap.doc_b} (jaccard {overlap.jaccard:.4f}):")
    for tw in overlap.shared_terms:
        print(f"  {tw.term}\t{tw.weight:.6f}")
    if not overlap.shared_terms:
        print("  (none)")
    return EXIT_OK


def cmd_serve(args, parser) -> int:
    import uvicorn

    state = _state(args, parser, parallelism=args.parallelism)
    app = create_app(state, cors_origins=args.cors_origin, static_dir=args.static_dir)
    print(
        f"serving {len(state.corpus)} cases on http://{args.host}:{args.port} "
        f"(backend {state.embeddings.backend_fingerprint})",
        file=sys.stderr,
    )
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # uvicorn signals startup failure via sys.exit
        if exc.code:
            print(f"service failed to start on {args.host}:{args.port}", file=sys.stderr)
            return EXIT_DOMAIN
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "embed": cmd_embed,
    "similar": cmd_similar,
    "matrix": cmd_matrix,
    "common-features": cmd_common_features,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    global _explicit_dests
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _explicit_dests = _collect_explicit_dests(argv, parser)
        _apply_config_file(parser, args)
        _require(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        return _COMMANDS[args.command](args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptyCandidatePool as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except DxsimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

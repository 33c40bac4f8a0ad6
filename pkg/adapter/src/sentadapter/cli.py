"""Adapter command line: `adapter parse` and `adapter embed`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .embedding import embed_tokens, iter_atom_texts
from .parsing import AdapterConfig, AdapterError, parse_to_conllu


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adapter",
        description="Convert raw text into the CoNLL-U and token-embedding "
        "files the evaluation toolkit consumes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    parse = sub.add_parser("parse", help="one sentence per line -> CoNLL-U")
    parse.add_argument("--in", dest="infile", required=True, help="input text file")
    parse.add_argument("--out", dest="outfile", required=True, help="output CoNLL-U file")
    parse.add_argument("--model", default="builtin", help="builtin or spacy:<name>")
    parse.add_argument(
        "--errors", help="error sidecar path (default: <out>.errors)"
    )

    embed = sub.add_parser("embed", help="atoms JSONL -> token embeddings JSONL")
    embed.add_argument("--in", dest="infile", required=True, help="atoms JSONL file")
    embed.add_argument("--out", dest="outfile", required=True, help="embeddings JSONL file")
    embed.add_argument("--model", default="hashed-64", help="hashed-<dim> or hf:<name>")
    embed.add_argument("--batch-size", type=int, default=32)
    return parser


def _cmd_parse(args) -> int:
    config = AdapterConfig(parser_model=args.model)
    lines = Path(args.infile).read_text(encoding="utf-8").splitlines()
    document, errors = parse_to_conllu(lines, config)
    Path(args.outfile).write_text(document, encoding="utf-8")
    sidecar = Path(args.errors) if args.errors else Path(args.outfile + ".errors")
    if errors:
        sidecar.write_text(
            "".join(f"{lineno}\t{reason}\n" for lineno, reason in errors),
            encoding="utf-8",
        )
        print(f"warning: {len(errors)} line(s) sent to {sidecar}", file=sys.stderr)
    return 0


def _cmd_embed(args) -> int:
    config = AdapterConfig(embedding_model=args.model, batch_size=args.batch_size)
    texts = iter_atom_texts(Path(args.infile).read_text(encoding="utf-8").splitlines())
    Path(args.outfile).write_text(embed_tokens(texts, config), encoding="utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"parse": _cmd_parse, "embed": _cmd_embed}
    try:
        return handlers[args.command](args)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

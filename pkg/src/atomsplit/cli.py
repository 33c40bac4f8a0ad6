"""Command-line entry points: split, eval, ingest.

Exit codes: 0 success, 1 fatal input error, 2 invariant violation detected
during the run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .depgraph import ConlluParseError, TreeValidationError, parse_conllu
from .pipeline import (
    InvariantViolation,
    PipelineInputError,
    SplitConfig,
    ingest_wikisplit,
    normalize_corpus,
    parse_config_file,
    run_pipeline,
    split_to_jsonl,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INVARIANT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomsplit",
        description="Decompose dependency-parsed sentences into atomic sentences "
        "and evaluate them against gold atom sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    split = sub.add_parser("split", help="CoNLL-U in, atoms JSONL on stdout")
    split.add_argument("conllu", help="CoNLL-U file with one block per sentence")
    split.add_argument("--config", help="flat key=value splitting options")

    evaluate = sub.add_parser("eval", help="full pipeline: split, align, score, classify")
    evaluate.add_argument("conllu", help="CoNLL-U file with parsed source sentences")
    evaluate.add_argument("gold", help="gold atoms, JSON lines with id/source/atoms")
    evaluate.add_argument("--config", help="flat key=value splitting options")
    evaluate.add_argument("--embeddings", help="token embeddings JSONL keyed by atom text")
    evaluate.add_argument("--report", help="write the JSON report here (default stdout)")
    evaluate.add_argument("--report-text", help="write the plain-text tables here")

    ingest = sub.add_parser(
        "ingest", help="WikiSplit TSV in, normalized source sentences on stdout"
    )
    ingest.add_argument("tsv", help="tab-separated complex/simple lines")
    ingest.add_argument("--separator", default="<::>", help="simple-side separator")
    return parser


def _cmd_split(args) -> int:
    config = SplitConfig()
    if args.config:
        config = parse_config_file(Path(args.config).read_text(encoding="utf-8"))
    with open(args.conllu, encoding="utf-8") as handle:
        trees = parse_conllu(handle)
    sys.stdout.write(split_to_jsonl(trees, config))
    return EXIT_OK


def _cmd_eval(args) -> int:
    report = run_pipeline(
        conllu_path=args.conllu,
        gold_path=args.gold,
        config_path=args.config,
        embeddings_path=args.embeddings,
    )
    report.self_check()
    payload = report.to_json()
    if args.report:
        Path(args.report).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    if args.report_text:
        Path(args.report_text).write_text(report.to_text(), encoding="utf-8")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    with open(args.tsv, encoding="utf-8") as handle:
        result = ingest_wikisplit(handle, separator=args.separator)
    for source in normalize_corpus(result.sources):
        sys.stdout.write(source + "\n")
    if result.skipped:
        print(f"warning: skipped {result.skipped} line(s) without a tab", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"split": _cmd_split, "eval": _cmd_eval, "ingest": _cmd_ingest}
    try:
        return handlers[args.command](args)
    except (PipelineInputError, ConlluParseError, TreeValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end evaluation pipeline: ingest corpora, split, align, score,
classify, and assemble a report whose tables mirror the usual presentation
(metric x P/R/F1, measure x model/gold, error x proportion).

Per-sentence work runs on a thread pool; the report is a single-threaded
reduction ordered by sentence id, so identical inputs yield byte-identical
reports.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .depgraph import DepTree, parse_conllu
from .diagnostics import ErrorDistribution, ErrorLabel, classify_error, error_distribution
from .metrics import (
    AlignedPair,
    CorpusStats,
    Score,
    TokenEmbeddings,
    align_atoms,
    corpus_scores,
    length_verb_stats,
    metric_tokenize,
    read_embeddings_jsonl,
    semantic_score,
)
from .splitter import SplitConfig, SplitOutcome, decompose

ROUGE_METRICS = ("rouge1", "rouge2", "rougeL")


class PipelineInputError(ValueError):
    """Unusable input: missing joins, malformed gold or config files."""


class InvariantViolation(RuntimeError):
    """A result that contradicts the pipeline's own guarantees."""


@dataclass(frozen=True)
class GoldRecord:
    id: str
    source: str
    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("gold record id must be non-empty")
        if not self.source:
            raise ValueError(f"gold record {self.id}: source must be non-empty")
        if not self.atoms or any(not a for a in self.atoms):
            raise ValueError(f"gold record {self.id}: atoms must be non-empty strings")


@dataclass(frozen=True)
class WikiSplitRecord:
    source: str
    simples: tuple[str, ...]


@dataclass(frozen=True)
class IngestResult:
    records: tuple[WikiSplitRecord, ...]
    skipped: int

    @property
    def sources(self) -> list[str]:
        return [r.source for r in self.records]


def ingest_wikisplit(
    source: str | IO[str] | Iterable[str], separator: str = "<::>"
) -> IngestResult:
    """Extract complex sentences from tab-separated WikiSplit lines.

    The simple side is kept only as reference. Non-empty lines without a tab
    are skipped and counted.
    """
    if isinstance(source, str):
        source = source.splitlines()
    records = []
    skipped = 0
    for raw in source:
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if "\t" not in line:
            skipped += 1
            continue
        complex_side, simple_side = line.split("\t", 1)
        simples = tuple(
            part.strip() for part in simple_side.split(separator) if part.strip()
        )
        records.append(WikiSplitRecord(source=complex_side.strip(), simples=simples))
    return IngestResult(records=tuple(records), skipped=skipped)


def normalize_corpus(sources: Iterable[str]) -> list[str]:
    """Lowercase everything and remove exact duplicates, first occurrence wins."""
    seen = set()
    out = []
    for source in sources:
        lowered = source.lower()
        if lowered in seen:
            continue
        seen.add(lowered)
        out.append(lowered)
    return out


def read_gold_jsonl(source: str | IO[str] | Iterable[str]) -> list[GoldRecord]:
    if isinstance(source, str):
        source = source.splitlines()
    records = []
    seen_ids = set()
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
            record = GoldRecord(
                id=str(row["id"]), source=row["source"], atoms=tuple(row["atoms"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PipelineInputError(f"gold line {lineno}: {exc}") from None
        if record.id in seen_ids:
            raise PipelineInputError(f"gold line {lineno}: duplicate id {record.id!r}")
        seen_ids.add(record.id)
        records.append(record)
    return records


def parse_config_file(text: str) -> SplitConfig:
    """Flat key=value lines; blank lines and # comments are allowed."""
    values = {}
    fields = {f: t for f, t in SplitConfig.__annotations__.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PipelineInputError(f"config line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in fields:
            raise PipelineInputError(f"config line {lineno}: unknown key {key!r}")
        if fields[key] == "bool":
            if value.lower() not in ("true", "false"):
                raise PipelineInputError(f"config line {lineno}: {key} must be true/false")
            values[key] = value.lower() == "true"
        else:
            try:
                values[key] = int(value)
            except ValueError:
                raise PipelineInputError(
                    f"config line {lineno}: {key} must be an integer"
                ) from None
    try:
        return SplitConfig(**values)
    except ValueError as exc:
        raise PipelineInputError(str(exc)) from None


@dataclass
class SentenceResult:
    record: GoldRecord
    tree: DepTree
    outcome: SplitOutcome
    pairs: list[AlignedPair]
    labels: list[ErrorLabel]
    missing_embeddings: int = 0


@dataclass
class EvalReport:
    config: SplitConfig
    corpus: dict
    rouge: dict[str, dict[str, Score]]
    semantic: dict[str, Score] | None
    stats: dict[str, CorpusStats]
    errors: ErrorDistribution
    pair_rows: list[dict] = field(default_factory=list)
    discarded: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        def score_dict(s: Score) -> dict:
            return {"precision": s.precision, "recall": s.recall, "f1": s.f1}

        def table_dict(table):
            return {
                name: {variant: score_dict(s) for variant, s in variants.items()}
                for name, variants in table.items()
            }

        return {
            "config": asdict(self.config),
            "corpus": self.corpus,
            "rouge": table_dict(self.rouge),
            "semantic": (
                {variant: score_dict(s) for variant, s in self.semantic.items()}
                if self.semantic
                else None
            ),
            "stats": {side: asdict(s) for side, s in self.stats.items()},
            "errors": {
                "counts": {label.value: n for label, n in self.errors.counts.items()},
                "proportions": {
                    label.value: p for label, p in self.errors.proportions.items()
                },
            },
            "pairs": self.pair_rows,
            "discarded_atoms": self.discarded,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        lines.append("== Lexical and structural overlap (macro-averaged) ==")
        lines.append(f"{'Metric':<10} {'Precision':>10} {'Recall':>10} {'F1':>10}   variant")
        for name, label in (("rouge1", "ROUGE-1"), ("rouge2", "ROUGE-2"), ("rougeL", "ROUGE-L")):
            for variant in ("all_pairs", "matched_only"):
                s = self.rouge[name][variant]
                lines.append(
                    f"{label:<10} {s.precision:>10.4f} {s.recall:>10.4f} {s.f1:>10.4f}   {variant}"
                )
        lines.append("")
        lines.append("== Semantic similarity ==")
        if self.semantic:
            lines.append(f"{'Metric':<10} {'Precision':>10} {'Recall':>10} {'F1':>10}   variant")
            for variant in ("all_pairs", "matched_only"):
                s = self.semantic[variant]
                lines.append(
                    f"{'semantic':<10} {s.precision:>10.4f} {s.recall:>10.4f} {s.f1:>10.4f}   {variant}"
                )
        else:
            lines.append("(no embeddings provided)")
        lines.append("")
        lines.append("== Length and verb counts ==")
        lines.append(f"{'Measure':<28} {'Model':>10} {'Gold':>10}")
        model, gold = self.stats["model"], self.stats["gold"]
        lines.append(
            f"{'Avg tokens per atom':<28} {model.avg_tokens_per_atom:>10.4f} {gold.avg_tokens_per_atom:>10.4f}"
        )
        lines.append(
            f"{'Avg verbs per atom':<28} {model.avg_verbs_per_atom:>10.4f} {gold.avg_verbs_per_atom:>10.4f}"
        )
        lines.append(f"{'Atom count':<28} {model.atom_count:>10} {gold.atom_count:>10}")
        lines.append("")
        lines.append("== Error distribution (proportions over non-Correct pairs) ==")
        lines.append(f"{'Error type':<24} {'Count':>6} {'Proportion':>11}")
        ordered = sorted(
            self.errors.counts.items(), key=lambda kv: (-kv[1], kv[0].value)
        )
        for label, count in ordered:
            prop = self.errors.proportions.get(label)
            prop_text = f"{prop:>11.4f}" if prop is not None else f"{'-':>11}"
            lines.append(f"{label.value:<24} {count:>6} {prop_text}")
        lines.append("")
        lines.append(
            f"sentences={self.corpus['sentences']} predicted_atoms={self.corpus['predicted_atoms']} "
            f"gold_atoms={self.corpus['gold_atoms']} pairs={self.corpus['pairs']} "
            f"matched_pairs={self.corpus['matched_pairs']}"
        )
        return "\n".join(lines) + "\n"

    def self_check(self) -> None:
        """Recompute every aggregate from the per-pair rows; raise on mismatch."""

        def mean_score(rows, name):
            picked = [r["scores"][name] for r in rows if r["scores"][name] is not None]
            if not picked:
                return Score.zero()
            return Score(
                sum(s["precision"] for s in picked) / len(picked),
                sum(s["recall"] for s in picked) / len(picked),
                sum(s["f1"] for s in picked) / len(picked),
            )

        def compare(got: Score, want: Score, what: str):
            for a, b in zip(
                (got.precision, got.recall, got.f1),
                (want.precision, want.recall, want.f1),
            ):
                if abs(a - b) > 1e-12:
                    raise InvariantViolation(f"{what} not recomputable from pair rows")

        for row in self.pair_rows:
            for name, s in row["scores"].items():
                if s is None:
                    continue
                for v in s.values():
                    if not 0.0 <= v <= 1.0:
                        raise InvariantViolation(
                            f"{name} score out of range in {row['sent_id']}: {s}"
                        )
        matched_rows = [
            r for r in self.pair_rows if r["predicted"] is not None and r["gold"] is not None
        ]
        for name in ROUGE_METRICS:
            compare(mean_score(self.pair_rows, name), self.rouge[name]["all_pairs"], name)
            compare(
                mean_score(matched_rows, name), self.rouge[name]["matched_only"], name
            )
        if self.semantic is not None:
            compare(
                mean_score(self.pair_rows, "semantic"),
                self.semantic["all_pairs"],
                "semantic",
            )
            compare(
                mean_score(matched_rows, "semantic"),
                self.semantic["matched_only"],
                "semantic (matched)",
            )
        labels = [r["label"] for r in self.pair_rows if r["label"] is not None]
        counts = {label: 0 for label in ErrorLabel}
        for value in labels:
            counts[ErrorLabel(value)] += 1
        if counts != self.errors.counts:
            raise InvariantViolation("error counts not recomputable from pair rows")
        if len(self.pair_rows) != self.corpus["pairs"]:
            raise InvariantViolation("pair count mismatch")
        if len(matched_rows) != self.corpus["matched_pairs"]:
            raise InvariantViolation("matched pair count mismatch")


def _stat_row(tree: DepTree, text: str) -> tuple[list[str], list[str]]:
    """Metric tokens of a text plus POS tags looked up by form in the source
    tree (same procedure for model and gold, so the comparison is fair)."""
    lookup = {}
    for tok in tree.tokens:
        for piece in metric_tokenize(tok.form):
            lookup.setdefault(piece, tok.upos)
    tokens = metric_tokenize(text)
    return tokens, [lookup.get(t, "X") for t in tokens]


def _evaluate_sentence(
    record: GoldRecord,
    tree: DepTree,
    config: SplitConfig,
    embeddings: dict[str, TokenEmbeddings] | None,
) -> SentenceResult:
    outcome = decompose(tree, config)
    pairs = align_atoms(list(outcome.atoms), list(record.atoms))
    missing_embeddings = 0
    if embeddings is not None:
        enriched = []
        for pair in pairs:
            if not pair.matched:
                enriched.append(
                    AlignedPair(
                        predicted=pair.predicted,
                        gold=pair.gold,
                        rouge1=pair.rouge1,
                        rouge2=pair.rouge2,
                        rougeL=pair.rougeL,
                        semantic=Score.zero(),
                    )
                )
                continue
            cand = embeddings.get(pair.predicted.text)
            ref = embeddings.get(pair.gold)
            if cand is None or ref is None or len(cand) == 0 or len(ref) == 0:
                missing_embeddings += 1
                enriched.append(pair)
                continue
            enriched.append(
                AlignedPair(
                    predicted=pair.predicted,
                    gold=pair.gold,
                    rouge1=pair.rouge1,
                    rouge2=pair.rouge2,
                    rougeL=pair.rougeL,
                    semantic=semantic_score(cand, ref),
                )
            )
        pairs = enriched
    labels = [
        classify_error(pair, tree) for pair in pairs if pair.gold is not None
    ]
    return SentenceResult(
        record=record,
        tree=tree,
        outcome=outcome,
        pairs=pairs,
        labels=labels,
        missing_embeddings=missing_embeddings,
    )


def run_pipeline(
    conllu_path: str | Path,
    gold_path: str | Path,
    config_path: str | Path | None = None,
    embeddings_path: str | Path | None = None,
    max_workers: int = 4,
) -> EvalReport:
    """split -> align -> score -> classify -> aggregate, joined on sent_id."""
    config = SplitConfig()
    if config_path is not None:
        config = parse_config_file(Path(config_path).read_text(encoding="utf-8"))
    with open(conllu_path, encoding="utf-8") as handle:
        trees = parse_conllu(handle)
    tree_index: dict[str, DepTree] = {}
    for tree in trees:
        if tree.sent_id in tree_index:
            raise PipelineInputError(f"duplicate sent_id {tree.sent_id!r} in parse file")
        tree_index[tree.sent_id] = tree
    with open(gold_path, encoding="utf-8") as handle:
        records = read_gold_jsonl(handle)
    if not records:
        raise PipelineInputError("gold file contains no records")
    unmatched = [r.id for r in records if r.id not in tree_index]
    if unmatched:
        raise PipelineInputError(
            "gold ids without a parse: " + ", ".join(sorted(unmatched))
        )
    embeddings = None
    if embeddings_path is not None:
        with open(embeddings_path, encoding="utf-8") as handle:
            embeddings = read_embeddings_jsonl(handle)

    records = sorted(records, key=lambda r: r.id)
    workers = max(1, min(max_workers, len(records)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(
                lambda r: _evaluate_sentence(r, tree_index[r.id], config, embeddings),
                records,
            )
        )

    return _assemble_report(config, results, embeddings is not None)


def _assemble_report(
    config: SplitConfig, results: list[SentenceResult], with_embeddings: bool
) -> EvalReport:
    all_pairs: list[AlignedPair] = []
    all_labels: list[ErrorLabel] = []
    pair_rows: list[dict] = []
    discarded: list[dict] = []
    model_rows: list[tuple[list[str], list[str]]] = []
    gold_rows: list[tuple[list[str], list[str]]] = []
    missing_embeddings = 0

    def score_dict(s: Score | None):
        if s is None:
            return None
        return {"precision": s.precision, "recall": s.recall, "f1": s.f1}

    for result in results:
        label_iter = iter(result.labels)
        for pair in result.pairs:
            all_pairs.append(pair)
            label = next(label_iter).value if pair.gold is not None else None
            predicted = None
            if pair.predicted is not None:
                predicted = {
                    "text": pair.predicted.text,
                    "token_ids": list(pair.predicted.span),
                    "rules": [
                        {"rule": r.rule.value, "anchor": r.anchor}
                        for r in pair.predicted.rules
                    ],
                }
            pair_rows.append(
                {
                    "sent_id": result.record.id,
                    "predicted": predicted,
                    "gold": pair.gold,
                    "scores": {
                        "rouge1": score_dict(pair.rouge1),
                        "rouge2": score_dict(pair.rouge2),
                        "rougeL": score_dict(pair.rougeL),
                        "semantic": score_dict(pair.semantic),
                    },
                    "label": label,
                }
            )
        all_labels.extend(result.labels)
        for item in result.outcome.discarded:
            discarded.append(
                {
                    "sent_id": item.source_sent_id,
                    "token_ids": list(item.token_ids),
                    "reason": item.reason,
                }
            )
        for atom in result.outcome.atoms:
            model_rows.append(_stat_row(result.tree, atom.text))
        for gold_atom in result.record.atoms:
            gold_rows.append(_stat_row(result.tree, gold_atom))
        missing_embeddings += result.missing_embeddings

    table = corpus_scores(all_pairs)
    rouge = {name: table[name] for name in ROUGE_METRICS}
    semantic = table.get("semantic") if with_embeddings else None
    stats = {
        "model": length_verb_stats(model_rows)
        if model_rows
        else CorpusStats(0.0, 0.0, 0),
        "gold": length_verb_stats(gold_rows),
    }
    errors = error_distribution(all_labels)
    matched = sum(1 for p in all_pairs if p.matched)
    corpus = {
        "sentences": len(results),
        "predicted_atoms": len(model_rows),
        "gold_atoms": len(gold_rows),
        "pairs": len(all_pairs),
        "matched_pairs": matched,
        "embeddings_provided": with_embeddings,
        "pairs_missing_embeddings": missing_embeddings if with_embeddings else None,
    }
    return EvalReport(
        config=config,
        corpus=corpus,
        rouge=rouge,
        semantic=semantic,
        stats=stats,
        errors=errors,
        pair_rows=pair_rows,
        discarded=discarded,
    )


def split_to_jsonl(trees: list[DepTree], config: SplitConfig) -> str:
    """One JSON object per atom, the `split` subcommand's output format."""
    lines = []
    for tree in sorted(trees, key=lambda t: t.sent_id):
        outcome = decompose(tree, config)
        for index, atom in enumerate(outcome.atoms):
            lines.append(
                json.dumps(
                    {
                        "sent_id": atom.source_sent_id,
                        "index": index,
                        "text": atom.text,
                        "token_ids": list(atom.span),
                        "rules": [
                            {"rule": r.rule.value, "anchor": r.anchor}
                            for r in atom.rules
                        ],
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )
    return "\n".join(lines) + ("\n" if lines else "")

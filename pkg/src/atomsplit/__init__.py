"""Atomic sentence extraction from dependency parses, with evaluation."""

from .depgraph import (
    ConlluParseError,
    DepTree,
    EmptyAtomError,
    Token,
    TokenSpan,
    TreeValidationError,
    linearize,
    parse_conllu,
    subtree_span,
    to_conllu,
)
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
    rouge_l,
    rouge_n,
    semantic_score,
)
from .pipeline import (
    EvalReport,
    GoldRecord,
    IngestResult,
    PipelineInputError,
    ingest_wikisplit,
    normalize_corpus,
    read_gold_jsonl,
    run_pipeline,
)
from .splitter import (
    AtomicSentence,
    Rule,
    RuleApplication,
    SplitConfig,
    decompose,
    detect_clause_sites,
    propagate_subject,
    split_sentence,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedPair",
    "AtomicSentence",
    "ConlluParseError",
    "CorpusStats",
    "DepTree",
    "EmptyAtomError",
    "ErrorDistribution",
    "ErrorLabel",
    "EvalReport",
    "GoldRecord",
    "IngestResult",
    "PipelineInputError",
    "Rule",
    "RuleApplication",
    "Score",
    "SplitConfig",
    "Token",
    "TokenEmbeddings",
    "TokenSpan",
    "TreeValidationError",
    "align_atoms",
    "classify_error",
    "corpus_scores",
    "decompose",
    "detect_clause_sites",
    "error_distribution",
    "ingest_wikisplit",
    "length_verb_stats",
    "linearize",
    "metric_tokenize",
    "normalize_corpus",
    "parse_conllu",
    "propagate_subject",
    "read_embeddings_jsonl",
    "read_gold_jsonl",
    "rouge_l",
    "rouge_n",
    "run_pipeline",
    "semantic_score",
    "split_sentence",
    "subtree_span",
    "to_conllu",
]

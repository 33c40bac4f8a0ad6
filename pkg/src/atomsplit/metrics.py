"""Overlap and similarity metrics: ROUGE-1/2/L, greedy embedding matching,
prediction-to-gold alignment, and corpus-level aggregates."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .splitter import AtomicSentence

_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")

NORM_TOLERANCE = 1e-6


class EmbeddingError(ValueError):
    """Embeddings that cannot be scored (empty side or dimension mismatch)."""


@dataclass(frozen=True)
class Score:
    """Precision/recall/F1 triple in [0, 1].

    Scores produced by the metric operations satisfy the harmonic-mean
    relation (use ``from_pr``); corpus aggregates average each component
    independently and are built directly.
    """

    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "Score":
        if precision + recall == 0:
            f1 = 0.0
        else:
            f1 = 2 * precision * recall / (precision + recall)
        return cls(precision, recall, f1)

    @classmethod
    def zero(cls) -> "Score":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AlignedPair:
    """One predicted atom matched to one gold atom (either side may be absent)."""

    predicted: AtomicSentence | None
    gold: str | None
    rouge1: Score
    rouge2: Score
    rougeL: Score
    semantic: Score | None = None

    def __post_init__(self):
        if self.predicted is None and self.gold is None:
            raise ValueError("aligned pair needs at least one side")

    @property
    def matched(self) -> bool:
        return self.predicted is not None and self.gold is not None


@dataclass(frozen=True, eq=False)
class TokenEmbeddings:
    """Per-token vectors for one text; rows must be L2-normalized."""

    tokens: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise EmbeddingError(f"vectors must be 2-dimensional, got shape {vectors.shape}")
        if len(self.tokens) != vectors.shape[0]:
            raise EmbeddingError(
                f"{len(self.tokens)} tokens but {vectors.shape[0]} vectors"
            )
        if vectors.shape[0]:
            norms = np.linalg.norm(vectors, axis=1)
            off = np.abs(norms - 1.0)
            if off.max() > NORM_TOLERANCE:
                raise EmbeddingError(
                    f"vectors must be L2-normalized within {NORM_TOLERANCE}, "
                    f"worst deviation {off.max():.2e}"
                )
        object.__setattr__(self, "vectors", vectors)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class CorpusStats:
    avg_tokens_per_atom: float
    avg_verbs_per_atom: float
    atom_count: int


def metric_tokenize(text: str) -> list[str]:
    """Lowercase tokens: maximal alphanumeric runs, apostrophes kept inside.

    Punctuation is discarded entirely.
    """
    return _WORD_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> Score:
    """Clipped n-gram overlap: each reference n-gram occurrence matches once."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    if not cand and not ref:
        return Score(1.0, 1.0, 1.0)
    matches = sum((Counter(cand) & Counter(ref)).values())
    precision = matches / len(cand) if cand else 0.0
    recall = matches / len(ref) if ref else 0.0
    return Score.from_pr(precision, recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> Score:
    """Longest-common-subsequence overlap with harmonic-mean F1."""
    if not candidate and not reference:
        return Score(1.0, 1.0, 1.0)
    if not candidate or not reference:
        return Score.zero()
    lcs = _lcs_length(candidate, reference)
    return Score.from_pr(lcs / len(candidate), lcs / len(reference))


def semantic_score(candidate: TokenEmbeddings, reference: TokenEmbeddings) -> Score:
    """Greedy matching over the cosine matrix, negatives floored at zero.

    Precision averages each candidate token's best match in the reference;
    recall averages each reference token's best match in the candidate.
    """
    if len(candidate) == 0 or len(reference) == 0:
        raise EmbeddingError("cannot score an empty embedding list")
    if candidate.dim != reference.dim:
        raise EmbeddingError(
            f"dimension mismatch: {candidate.dim} vs {reference.dim}"
        )
    sim = np.clip(candidate.vectors @ reference.vectors.T, 0.0, 1.0)
    precision = float(sim.max(axis=1).mean())
    recall = float(sim.max(axis=0).mean())
    return Score.from_pr(precision, recall)


def align_atoms(
    predicted: Sequence[AtomicSentence], gold: Sequence[str]
) -> list[AlignedPair]:
    """Greedy one-to-one matching on the ROUGE-1 F1 matrix.

    The highest cell wins each round (ties: lower predicted index, then lower
    gold index). Leftovers on either side become pairs with an empty partner
    and all-zero scores.
    """
    if not predicted and not gold:
        raise ValueError("cannot align two empty atom lists")
    pred_tokens = [metric_tokenize(a.text) for a in predicted]
    gold_tokens = [metric_tokenize(g) for g in gold]
    f1 = [
        [rouge_n(p, g, 1).f1 for g in gold_tokens] for p in pred_tokens
    ]
    open_pred = list(range(len(predicted)))
    open_gold = list(range(len(gold)))
    match_for_pred: dict[int, int] = {}
    while open_pred and open_gold:
        best = max(
            ((f1[i][j], -i, -j) for i in open_pred for j in open_gold),
        )
        i, j = -best[1], -best[2]
        match_for_pred[i] = j
        open_pred.remove(i)
        open_gold.remove(j)

    def scored(i: int | None, j: int | None) -> AlignedPair:
        if i is None or j is None:
            return AlignedPair(
                predicted=None if i is None else predicted[i],
                gold=None if j is None else gold[j],
                rouge1=Score.zero(),
                rouge2=Score.zero(),
                rougeL=Score.zero(),
            )
        p, g = pred_tokens[i], gold_tokens[j]
        return AlignedPair(
            predicted=predicted[i],
            gold=gold[j],
            rouge1=rouge_n(p, g, 1),
            rouge2=rouge_n(p, g, 2),
            rougeL=rouge_l(p, g),
        )

    pairs = [scored(i, match_for_pred.get(i)) for i in range(len(predicted))]
    pairs.extend(scored(None, j) for j in open_gold)
    return pairs


PAIR_METRICS = ("rouge1", "rouge2", "rougeL", "semantic")


def _macro(scores: Sequence[Score]) -> Score:
    if not scores:
        return Score.zero()
    return Score(
        sum(s.precision for s in scores) / len(scores),
        sum(s.recall for s in scores) / len(scores),
        sum(s.f1 for s in scores) / len(scores),
    )


def corpus_scores(pairs: Sequence[AlignedPair]) -> dict[str, dict[str, Score]]:
    """Macro-average per metric, both over all pairs and over matched pairs only.

    The "semantic" entry appears only when at least one pair carries a
    semantic score; pairs without one are skipped for that metric.
    """
    if not pairs:
        raise ValueError("cannot aggregate an empty pair list")
    table: dict[str, dict[str, Score]] = {}
    for metric in PAIR_METRICS:
        scores = [(p, getattr(p, metric)) for p in pairs]
        scores = [(p, s) for p, s in scores if s is not None]
        if not scores:
            continue
        table[metric] = {
            "all_pairs": _macro([s for _, s in scores]),
            "matched_only": _macro([s for p, s in scores if p.matched]),
        }
    return table


def length_verb_stats(
    atoms: Sequence[tuple[Sequence[str], Sequence[str]]]
) -> CorpusStats:
    """Average token count and VERB count per atom (AUX does not count)."""
    if not atoms:
        raise ValueError("cannot compute stats over zero atoms")
    total_tokens = 0
    total_verbs = 0
    for tokens, upos in atoms:
        if len(tokens) != len(upos):
            raise ValueError(
                f"token/upos lists differ in length: {len(tokens)} vs {len(upos)}"
            )
        total_tokens += len(tokens)
        total_verbs += sum(1 for u in upos if u == "VERB")
    return CorpusStats(
        avg_tokens_per_atom=total_tokens / len(atoms),
        avg_verbs_per_atom=total_verbs / len(atoms),
        atom_count=len(atoms),
    )


def read_embeddings_jsonl(source: str | IO[str] | Iterable[str]) -> dict[str, TokenEmbeddings]:
    """Read the line-per-atom embeddings format: {"id", "tokens", "vectors"}.

    The id keys an atom's text. The first occurrence of an id wins.
    """
    if isinstance(source, str):
        source = source.splitlines()
    table: dict[str, TokenEmbeddings] = {}
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
            key = row["id"]
            emb = TokenEmbeddings(
                tokens=tuple(row["tokens"]), vectors=np.asarray(row["vectors"], dtype=np.float64)
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"embeddings line {lineno}: {exc}") from None
        table.setdefault(key, emb)
    return table

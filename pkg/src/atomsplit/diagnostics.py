"""Automated error taxonomy over aligned pairs.

Each pair with a gold side gets exactly one label, decided from the tokens
the prediction is missing and the dependency structure of the source tree.
The heuristics are approximations of a manual audit; the fixture suite is
their correctness contract.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .depgraph import DepTree, subtree_span
from .metrics import AlignedPair, metric_tokenize
from .splitter import SUBJECT_DEPRELS, VERBAL_UPOS

CORRECT_F1_THRESHOLD = 0.9


class ErrorLabel(enum.Enum):
    CORRECT = "Correct"
    MISSING_SUBJECT = "MissingSubject"
    MISSING_OBJECT = "MissingObject"
    COORDINATION = "CoordinationError"
    RELATIVE_CLAUSE = "RelativeClauseError"
    ADVERBIAL_CLAUSE = "AdverbialClauseError"
    APPOSITIVE = "AppositiveError"
    TRUNCATED = "Truncated"
    OTHER = "Other"


@dataclass(frozen=True)
class ErrorDistribution:
    """Counts for every label; proportions over the non-Correct ones."""

    counts: dict[ErrorLabel, int]
    proportions: dict[ErrorLabel, float]


def _forms(tree: DepTree, ids) -> list[str]:
    out = []
    for i in sorted(ids):
        out.extend(metric_tokenize(tree.token(i).form))
    return out


def _is_missing(tree: DepTree, ids, missing: Counter) -> bool:
    forms = _forms(tree, ids)
    return bool(forms) and not (Counter(forms) - missing)


def _clause_root(pair: AlignedPair, tree: DepTree) -> int:
    """The root of the clause the prediction came from.

    With span provenance: the shallowest span token whose head lies outside
    the span, verbal tokens preferred on ties. Without it: the tree root.
    """
    if pair.predicted is None or not len(pair.predicted.span):
        return tree.root.id
    ids = set(pair.predicted.span)
    candidates = [i for i in ids if tree.token(i).head not in ids]
    if not candidates:
        return tree.root.id
    return min(
        candidates,
        key=lambda i: (tree.depth(i), tree.token(i).upos not in VERBAL_UPOS, i),
    )


def _clause_site_conditions(tree: DepTree, missing: Counter) -> set[ErrorLabel]:
    """Clause-level conditions: a site subtree wholly absent from the
    prediction. A site nested inside a larger missing site is subsumed by it
    and does not fire on its own."""
    fired: list[tuple[frozenset[int], ErrorLabel]] = []
    for tok in tree.tokens:
        label = None
        if tok.deprel == "relcl":
            label = ErrorLabel.RELATIVE_CLAUSE
        elif tok.deprel == "advcl" or tok.deprel == "obl" or tok.deprel.startswith(("advcl:", "obl:")):
            label = ErrorLabel.ADVERBIAL_CLAUSE
        elif tok.deprel == "appos":
            label = ErrorLabel.APPOSITIVE
        elif tok.deprel == "conj":
            own_subject = any(
                tree.token(c).deprel in SUBJECT_DEPRELS for c in tree.children(tok.id)
            )
            if tok.upos in VERBAL_UPOS or own_subject:
                label = ErrorLabel.COORDINATION
        if label is None:
            continue
        ids = frozenset(subtree_span(tree, tok.id))
        if _is_missing(tree, ids, missing):
            fired.append((ids, label))
    survivors = set()
    for ids, label in fired:
        if any(ids < other_ids for other_ids, _ in fired):
            continue
        survivors.add(label)
    return survivors


def classify_error(pair: AlignedPair, source: DepTree) -> ErrorLabel:
    """Assign one label to a pair, given the tree its prediction came from.

    Specific conditions outrank generic ones: a single missing core argument
    (subject/object) wins outright, a strict-prefix prediction is Truncated
    even when the cut-off tail contains modifier subtrees, and exactly one
    missing clause-level structure yields that clause's label. Anything
    else, including several conditions at once, is Other.
    """
    if pair.gold is None:
        raise ValueError("cannot classify a pair with no gold side")
    predicted_tokens = (
        metric_tokenize(pair.predicted.text) if pair.predicted is not None else []
    )
    gold_tokens = metric_tokenize(pair.gold)
    missing = Counter(gold_tokens) - Counter(predicted_tokens)
    if pair.rouge1.f1 >= CORRECT_F1_THRESHOLD and not missing:
        return ErrorLabel.CORRECT

    root = _clause_root(pair, source)
    root_tok = source.token(root)
    root_forms = metric_tokenize(root_tok.form)

    subject_ids: set[int] = set()
    object_ids: set[int] = set()
    for child in source.children(root):
        deprel = source.token(child).deprel
        if deprel in SUBJECT_DEPRELS:
            subject_ids.update(subtree_span(source, child))
        elif deprel == "obj":
            object_ids.update(subtree_span(source, child))

    # A prediction that opens with its clause's verb lost the subject, unless
    # the gold opens with that same verb (then there was none to lose).
    starts_with_root_verb = bool(
        predicted_tokens
        and root_tok.upos in VERBAL_UPOS
        and root_forms
        and predicted_tokens[0] == root_forms[0]
        and not (gold_tokens and gold_tokens[0] == root_forms[0])
    )
    missing_subject = (
        bool(subject_ids) and _is_missing(source, subject_ids, missing)
    ) or starts_with_root_verb
    root_verb_predicted = bool(root_forms) and not (
        Counter(root_forms) - Counter(predicted_tokens)
    )
    missing_object = (
        bool(object_ids)
        and _is_missing(source, object_ids, missing)
        and root_verb_predicted
    )

    clause_fired = _clause_site_conditions(source, missing)
    # A prediction built around the relative clause while the matrix
    # predicate is gone has the clause relation inverted.
    if not clause_fired:
        matrix_forms = metric_tokenize(source.root.form)
        matrix_missing = bool(matrix_forms) and not (Counter(matrix_forms) - missing)
        for tok in source.tokens:
            if tok.deprel == "relcl" and matrix_missing:
                if root == tok.id or root_tok.form.lower() == tok.form.lower():
                    clause_fired = {ErrorLabel.RELATIVE_CLAUSE}
                    break

    truncated = (
        bool(predicted_tokens)
        and len(predicted_tokens) < len(gold_tokens)
        and gold_tokens[: len(predicted_tokens)] == predicted_tokens
    )

    core = [
        label
        for label, hit in (
            (ErrorLabel.MISSING_SUBJECT, missing_subject),
            (ErrorLabel.MISSING_OBJECT, missing_object),
        )
        if hit
    ]
    if len(core) == 1 and not clause_fired:
        return core[0]
    if truncated and not core:
        return ErrorLabel.TRUNCATED
    if not core and len(clause_fired) == 1:
        return next(iter(clause_fired))
    return ErrorLabel.OTHER


def error_distribution(labels: list[ErrorLabel]) -> ErrorDistribution:
    """Counts for all labels; proportions over the non-Correct subset."""
    if not labels:
        raise ValueError("cannot summarize zero labels")
    counts = {label: 0 for label in ErrorLabel}
    for label in labels:
        counts[label] += 1
    errors = sum(n for label, n in counts.items() if label is not ErrorLabel.CORRECT)
    proportions = {}
    if errors:
        proportions = {
            label: n / errors
            for label, n in counts.items()
            if label is not ErrorLabel.CORRECT and n > 0
        }
    return ErrorDistribution(counts=counts, proportions=proportions)

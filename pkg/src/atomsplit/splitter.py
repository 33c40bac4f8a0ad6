"""Rule-based decomposition of a dependency tree into atomic sentences.

The rule pipeline, in fixed order: coordinated clauses are severed at the
conjunct, relative clauses are extracted with the relative pronoun replaced
by its antecedent, adverbial clauses are extracted with their subordinator
dropped, appositives (when enabled) become copular-less restatements,
coordinated phrases clone their clause once per conjunct, and clauses left
without a subject inherit one from the nearest enclosing clause.

Everything here is a pure function over immutable trees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .depgraph import DepTree, TokenSpan, subtree_span

RELATIVE_PRONOUN_LEMMAS = {"who", "whom", "which", "that", "where", "when", "whose"}
SUBJECT_DEPRELS = ("nsubj", "nsubj:pass")
VERBAL_UPOS = ("VERB", "AUX")


class Rule(enum.Enum):
    COORD_CLAUSE = "CoordClause"
    COORD_PHRASE = "CoordPhrase"
    RELATIVE_CLAUSE = "RelativeClause"
    ADVERBIAL_CLAUSE = "AdverbialClause"
    APPOSITIVE = "Appositive"
    SUBJECT_COPY = "SubjectCopy"


# Emission order of rule records inside one atom.
_RULE_ORDER = {
    Rule.COORD_CLAUSE: 0,
    Rule.RELATIVE_CLAUSE: 1,
    Rule.ADVERBIAL_CLAUSE: 2,
    Rule.APPOSITIVE: 3,
    Rule.COORD_PHRASE: 4,
    Rule.SUBJECT_COPY: 5,
}

_CLAUSE_KINDS = (
    Rule.COORD_CLAUSE,
    Rule.RELATIVE_CLAUSE,
    Rule.ADVERBIAL_CLAUSE,
    Rule.APPOSITIVE,
)


@dataclass(frozen=True)
class RuleApplication:
    rule: Rule
    anchor: int


@dataclass(frozen=True)
class SplitConfig:
    enable_appositive_rule: bool = False
    keep_subordinator: bool = False
    max_atoms_per_sentence: int = 8
    min_atom_tokens: int = 2

    def __post_init__(self):
        if self.max_atoms_per_sentence < 1:
            raise ValueError("max_atoms_per_sentence must be >= 1")
        if self.min_atom_tokens < 1:
            raise ValueError("min_atom_tokens must be >= 1")


@dataclass(frozen=True)
class AtomicSentence:
    """One extracted atom with provenance into its source tree."""

    text: str
    source_sent_id: str
    span: TokenSpan
    rules: tuple[RuleApplication, ...]

    def __post_init__(self):
        if not self.text:
            raise ValueError("atomic sentence text must be non-empty")


@dataclass(frozen=True)
class DiscardedAtom:
    source_sent_id: str
    token_ids: tuple[int, ...]
    reason: str


@dataclass(frozen=True)
class SplitOutcome:
    atoms: tuple[AtomicSentence, ...]
    discarded: tuple[DiscardedAtom, ...]
    # Token ids removed by the rules rather than carried into an atom,
    # mapped to the reason (cc, mark, relative-pronoun, punct).
    dropped: dict[int, str]


def detect_clause_sites(
    tree: DepTree, config: SplitConfig | None = None
) -> list[tuple[int, Rule]]:
    """All rule anchors in the tree, ordered by token id.

    A conj token counts as a coordinated clause when it is verbal or brings
    its own subject; other conj tokens coordinate phrases. Appositive sites
    are reported only when the rule is enabled.
    """
    config = config or SplitConfig()
    sites: list[tuple[int, Rule]] = []
    for tok in tree.tokens:
        if tok.deprel == "advcl":
            sites.append((tok.id, Rule.ADVERBIAL_CLAUSE))
        elif tok.deprel == "relcl":
            sites.append((tok.id, Rule.RELATIVE_CLAUSE))
        elif tok.deprel == "appos" and config.enable_appositive_rule:
            sites.append((tok.id, Rule.APPOSITIVE))
        elif tok.deprel == "conj":
            own_subject = any(
                tree.token(c).deprel in SUBJECT_DEPRELS for c in tree.children(tok.id)
            )
            if tok.upos in VERBAL_UPOS or own_subject:
                sites.append((tok.id, Rule.COORD_CLAUSE))
            else:
                sites.append((tok.id, Rule.COORD_PHRASE))
    return sites


def propagate_subject(
    tree: DepTree,
    clause_root: int,
    enclosing_clause_roots: Sequence[int],
    site_anchors: Iterable[int] | None = None,
) -> TokenSpan | None:
    """Copy a subject span from the nearest enclosing clause that has one.

    ``enclosing_clause_roots`` is searched innermost-first. The copied span
    is the subject's subtree pruned of any rule-site subtrees (detected with
    default settings when ``site_anchors`` is not given). Returns None when
    no enclosing clause has a subject.
    """
    tree.token(clause_root)
    if site_anchors is None:
        site_anchors = [a for a, _ in detect_clause_sites(tree)]
    anchors = set(site_anchors)
    for root_id in enclosing_clause_roots:
        for child in tree.children(root_id):
            if tree.token(child).deprel in SUBJECT_DEPRELS:
                return subtree_span(tree, child, excluded_roots=anchors - {child})
    return None


def split_sentence(tree: DepTree, config: SplitConfig | None = None) -> list[AtomicSentence]:
    """Decompose one tree; see ``decompose`` for the traced variant."""
    return list(decompose(tree, config).atoms)


# ---------------------------------------------------------------------------
# Decomposition internals


@dataclass
class _Variant:
    ordered_ids: list[int]
    rules: list[RuleApplication] = field(default_factory=list)


@dataclass
class _Clause:
    root: int
    site: tuple[int, Rule] | None  # None for the matrix clause
    members: list[int] = field(default_factory=list)
    parent: "_Clause | None" = None
    children: list["_Clause"] = field(default_factory=list)
    variants: list[_Variant] = field(default_factory=list)
    groups: list[tuple[int, list[int]]] = field(default_factory=list)
    antecedent_ids: list[int] = field(default_factory=list)


class _Cancel(Exception):
    """Signals the retry loop to deactivate one site or group."""

    def __init__(self, kind: str, key: int):
        super().__init__(f"cancel {kind} {key}")
        self.kind = kind  # "clause" or "group"
        self.key = key


def decompose(tree: DepTree, config: SplitConfig | None = None) -> SplitOutcome:
    """Full decomposition with the drop record and any discarded atoms."""
    config = config or SplitConfig()
    sites = detect_clause_sites(tree, config)
    active_clause = [(a, k) for a, k in sites if k is not Rule.COORD_PHRASE]
    groups: dict[int, list[int]] = {}
    for anchor, kind in sites:
        if kind is Rule.COORD_PHRASE:
            groups.setdefault(tree.token(anchor).head, []).append(anchor)
    active_groups = sorted(groups.items())

    while True:
        try:
            atoms, dropped, discarded = _realize(tree, config, active_clause, active_groups)
        except _Cancel as cancel:
            if cancel.kind == "clause":
                active_clause = [(a, k) for a, k in active_clause if a != cancel.key]
            else:
                active_groups = [(h, a) for h, a in active_groups if h != cancel.key]
            continue
        if len(atoms) > config.max_atoms_per_sentence:
            _deactivate_last(active_clause, active_groups)
            continue
        return SplitOutcome(atoms=tuple(atoms), discarded=tuple(discarded), dropped=dropped)


def _deactivate_last(
    active_clause: list[tuple[int, Rule]], active_groups: list[tuple[int, list[int]]]
) -> None:
    """Drop the item with the highest anchor so the atom count shrinks."""
    last_clause = max((a for a, _ in active_clause), default=-1)
    last_group = max((max(anchors) for _, anchors in active_groups), default=-1)
    if last_group > last_clause:
        active_groups[:] = [(h, a) for h, a in active_groups if max(a) != last_group]
    else:
        active_clause[:] = [(a, k) for a, k in active_clause if a != last_clause]


def _realize(
    tree: DepTree,
    config: SplitConfig,
    active_clause: list[tuple[int, Rule]],
    active_groups: list[tuple[int, list[int]]],
):
    clause_anchors = {a: k for a, k in active_clause}
    all_anchors = set(clause_anchors) | {
        a for _, anchors in active_groups for a in anchors
    }
    dropped: dict[int, str] = {}

    # Coordination delimiters: cc and punctuation hanging off either the
    # shared head or a conjunct, positioned between the head and the last
    # severed conjunct. Covers both cc-attachment styles seen in parsers.
    coord: dict[int, list[int]] = {}
    for anchor, kind in active_clause:
        if kind is Rule.COORD_CLAUSE:
            coord.setdefault(tree.token(anchor).head, []).append(anchor)
    for head, anchors in active_groups:
        coord.setdefault(head, []).extend(anchors)
    for head, anchors in coord.items():
        upper = max(anchors)
        hosts = {head, *anchors}
        for tok in tree.tokens:
            if tok.head in hosts and head < tok.id <= upper:
                if tok.deprel == "cc":
                    dropped[tok.id] = "cc"
                elif tok.deprel == "punct":
                    dropped[tok.id] = "punct"

    if not config.keep_subordinator:
        for anchor, kind in active_clause:
            if kind is Rule.ADVERBIAL_CLAUSE:
                for child in tree.children(anchor):
                    if tree.token(child).deprel == "mark":
                        dropped[child] = "mark"
    for anchor, kind in active_clause:
        if kind is Rule.APPOSITIVE:
            for child in tree.children(anchor):
                if tree.token(child).deprel == "punct":
                    dropped[child] = "punct"

    clauses = _build_clauses(tree, clause_anchors)
    _attach_groups(tree, clauses, active_groups)

    for clause in clauses.values():
        _build_variants(tree, config, clause, clause_anchors, all_anchors, dropped)

    matrix = clauses[tree.root.id]
    atoms: list[AtomicSentence] = []
    discarded: list[DiscardedAtom] = []
    stripped_anywhere: dict[int, str] = {}

    for clause, variant in _emit(matrix):
        kept, stripped = _surface(tree, variant.ordered_ids, dropped)
        for sid in stripped:
            stripped_anywhere[sid] = "punct"
        if not kept:
            _merge_or_discard(tree, clause, variant, discarded, empty=True)
            continue
        if len(kept) < config.min_atom_tokens:
            if _merge_or_discard(tree, clause, variant, discarded, empty=False):
                continue
        text = " ".join(tree.token(i).form.lower() for i in kept)
        rules = tuple(
            sorted(variant.rules, key=lambda r: (_RULE_ORDER[r.rule], r.anchor))
        )
        atoms.append(
            AtomicSentence(
                text=text,
                source_sent_id=tree.sent_id,
                span=TokenSpan.of(kept),
                rules=rules,
            )
        )

    kept_ids = {i for atom in atoms for i in atom.span}
    for sid, reason in stripped_anywhere.items():
        if sid not in kept_ids and sid not in dropped:
            dropped[sid] = reason
    return atoms, dropped, discarded


def _merge_or_discard(tree, clause, variant, discarded, empty):
    """Handle an empty or too-short atom.

    Site clauses and cloned variants merge back by cancelling the site that
    created them. A matrix atom with nothing to cancel is kept when short and
    discarded (with a trace) only when empty. Returns True when the atom is
    consumed here.
    """
    if clause.site is not None:
        raise _Cancel("clause", clause.site[0])
    if clause.groups:
        raise _Cancel("group", clause.groups[-1][0])
    if clause.children:
        raise _Cancel("clause", clause.children[0].site[0])
    if empty:
        discarded.append(
            DiscardedAtom(
                source_sent_id=tree.sent_id,
                token_ids=tuple(variant.ordered_ids),
                reason="empty after punctuation stripping",
            )
        )
        return True
    return False  # a short matrix atom with nothing to cancel stands as-is


def _build_clauses(tree: DepTree, clause_anchors: dict[int, Rule]) -> dict[int, _Clause]:
    roots = [tree.root.id] + sorted(clause_anchors)
    clauses = {
        r: _Clause(root=r, site=(r, clause_anchors[r]) if r in clause_anchors else None)
        for r in roots
    }
    anchor_set = set(clause_anchors)
    for r, clause in clauses.items():
        clause.members = list(subtree_span(tree, r, excluded_roots=anchor_set - {r}))
    for r, clause in clauses.items():
        if clause.site is None:
            continue
        parent_root = _clause_of(tree, tree.token(r).head, anchor_set)
        clause.parent = clauses[parent_root]
        clause.parent.children.append(clause)
    for clause in clauses.values():
        clause.children.sort(key=lambda c: c.root)
    return clauses


def _clause_of(tree: DepTree, token_id: int, anchor_set: set[int]) -> int:
    cur = token_id
    while cur != 0:
        if cur in anchor_set:
            return cur
        cur = tree.token(cur).head
    return tree.root.id


def _attach_groups(tree, clauses, active_groups):
    anchor_set = {c.root for c in clauses.values() if c.site is not None}
    for head, anchors in active_groups:
        owner = clauses[_clause_of(tree, head, anchor_set)]
        owner.groups.append((head, sorted(anchors)))
    for clause in clauses.values():
        clause.groups.sort()


def _find_relative_pronoun(tree: DepTree, clause: _Clause) -> int | None:
    for tid in clause.members:
        if tid == clause.root:
            continue
        tok = tree.token(tid)
        if tok.lemma.lower() in RELATIVE_PRONOUN_LEMMAS and tok.deprel != "mark":
            return tid
    return None


def _build_variants(tree, config, clause, clause_anchors, all_anchors, dropped):
    ordered = list(clause.members)
    base_rules: list[RuleApplication] = []
    if clause.site is not None:
        base_rules.append(RuleApplication(clause.site[1], clause.site[0]))
    for child in clause.children:
        base_rules.append(RuleApplication(child.site[1], child.site[0]))

    kind = clause.site[1] if clause.site else None
    if kind is Rule.RELATIVE_CLAUSE:
        pronoun = _find_relative_pronoun(tree, clause)
        head = tree.token(clause.root).head
        clause.antecedent_ids = list(
            subtree_span(tree, head, excluded_roots=set(clause_anchors) - {head})
        )
        if pronoun is not None:
            dropped[pronoun] = "relative-pronoun"
            at = ordered.index(pronoun)
            ordered = ordered[:at] + clause.antecedent_ids + ordered[at + 1 :]
    elif kind is Rule.APPOSITIVE:
        head = tree.token(clause.root).head
        host_ids = subtree_span(tree, head, excluded_roots=set(clause_anchors) - {head})
        clause.antecedent_ids = list(host_ids)
        ordered = sorted(set(ordered) | set(host_ids))

    variants = [_Variant(ordered_ids=ordered, rules=list(base_rules))]
    for head, anchors in clause.groups:
        phrase_ids = set(subtree_span(tree, head, excluded_roots=set(clause_anchors) - {head}))
        conjunct_spans = [
            set(subtree_span(tree, head, excluded_roots=(set(anchors) | set(clause_anchors)) - {head}))
        ]
        for anchor in anchors:
            conjunct_spans.append(
                set(
                    subtree_span(
                        tree,
                        anchor,
                        excluded_roots=(set(anchors) | set(clause_anchors)) - {anchor},
                    )
                )
            )
        group_rules = [RuleApplication(Rule.COORD_PHRASE, a) for a in anchors]
        expanded: list[_Variant] = []
        for variant in variants:
            present = phrase_ids & set(variant.ordered_ids)
            if not present:
                expanded.append(variant)
                continue
            for span in conjunct_spans:
                remove = phrase_ids - span
                expanded.append(
                    _Variant(
                        ordered_ids=[i for i in variant.ordered_ids if i not in remove],
                        rules=variant.rules + group_rules,
                    )
                )
        variants = expanded

    has_subject = any(
        tree.token(tid).head == clause.root and tree.token(tid).deprel in SUBJECT_DEPRELS
        for tid in clause.members
    )
    # The appositive atom is a nominal restatement of its host and never
    # takes a copied subject.
    if not has_subject and kind is not Rule.APPOSITIVE:
        copied = propagate_subject(
            tree, clause.root, tree.ancestors(clause.root), site_anchors=all_anchors
        )
        copied_ids = _resolve_pronoun_subject(tree, copied, clause_anchors)
        if copied_ids:
            for variant in variants:
                fresh = [i for i in copied_ids if i not in variant.ordered_ids]
                if not fresh:
                    continue
                variant.ordered_ids = fresh + variant.ordered_ids
                variant.rules.append(RuleApplication(Rule.SUBJECT_COPY, clause.root))
    clause.variants = variants


def _resolve_pronoun_subject(tree, copied, clause_anchors) -> list[int]:
    """A copied subject that is itself a relative pronoun stands for the
    antecedent of its clause; substitute the antecedent span."""
    if copied is None:
        return []
    ids = list(copied)
    if len(ids) == 1:
        tok = tree.token(ids[0])
        if tok.lemma.lower() in RELATIVE_PRONOUN_LEMMAS:
            cur = tok.head
            while cur != 0 and cur not in clause_anchors:
                cur = tree.token(cur).head
            if cur != 0 and clause_anchors.get(cur) is Rule.RELATIVE_CLAUSE:
                head = tree.token(cur).head
                return list(
                    subtree_span(tree, head, excluded_roots=set(clause_anchors) - {head})
                )
    return ids


def _emit(clause: _Clause):
    for variant in clause.variants:
        yield clause, variant
    for child in clause.children:
        yield from _emit(child)


def _surface(tree: DepTree, ordered_ids: Sequence[int], dropped: dict[int, str]):
    kept = [i for i in ordered_ids if i not in dropped]
    stripped = []
    while kept and tree.token(kept[0]).upos == "PUNCT":
        stripped.append(kept.pop(0))
    while kept and tree.token(kept[-1]).upos == "PUNCT":
        stripped.append(kept.pop())
    return kept, stripped

"""CoNLL-U dependency trees: parsing, validation, subtree queries, linearization.

Trees are immutable after construction and every operation here is read-only,
so they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

# Older tagsets still circulate; fold them into one internal label so the
# splitting rules only ever consult a single spelling.
DEPREL_ALIASES = {
    "acl:relcl": "relcl",
    "dobj": "obj",
    "nsubjpass": "nsubj:pass",
}

N_COLUMNS = 10


class ConlluParseError(ValueError):
    """A malformed CoNLL-U row; carries the 1-based input line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TreeValidationError(ValueError):
    """A structurally invalid tree; carries the offending sent_id."""

    def __init__(self, message: str, sent_id: str):
        super().__init__(f"sentence {sent_id!r}: {message}")
        self.sent_id = sent_id


class UnknownTokenId(LookupError):
    """A token id that does not exist in the tree."""


class EmptyAtomError(ValueError):
    """Linearization removed every token; the caller decides what to do."""


@dataclass(frozen=True)
class Token:
    """One syntactic word. ``head`` is 0 for the root token."""

    id: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"token id must be >= 1, got {self.id}")
        if self.head < 0:
            raise ValueError(f"token head must be >= 0, got {self.head}")
        if not self.form:
            raise ValueError(f"token {self.id} has an empty form")


@dataclass(frozen=True)
class TokenSpan:
    """An ascending set of token ids into one tree."""

    token_ids: tuple[int, ...]

    def __post_init__(self):
        ids = self.token_ids
        if any(ids[i] >= ids[i + 1] for i in range(len(ids) - 1)):
            raise ValueError(f"span ids must be strictly ascending: {ids}")

    @classmethod
    def of(cls, ids: Iterable[int]) -> "TokenSpan":
        return cls(tuple(sorted(set(ids))))

    def __len__(self) -> int:
        return len(self.token_ids)

    def __contains__(self, token_id: int) -> bool:
        return token_id in self.token_ids

    def __iter__(self):
        return iter(self.token_ids)


@dataclass(frozen=True)
class DepTree:
    """One parsed sentence as a rooted dependency tree.

    Construction validates the structural invariants (contiguous ids, a single
    root, resolvable heads, acyclicity) and raises TreeValidationError on the
    first violation.
    """

    sent_id: str
    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        by_id = {}
        children: dict[int, list[int]] = {0: []}
        n = len(self.tokens)
        if n == 0:
            raise TreeValidationError("tree has no tokens", self.sent_id)
        for expected, tok in enumerate(self.tokens, start=1):
            if tok.id != expected:
                raise TreeValidationError(
                    f"token ids must be exactly 1..{n}, found {tok.id} at position {expected}",
                    self.sent_id,
                )
            by_id[tok.id] = tok
            children[tok.id] = []
        roots = [t for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise TreeValidationError(
                f"expected exactly one root token, found {len(roots)}", self.sent_id
            )
        if roots[0].deprel != "root":
            raise TreeValidationError(
                f"root token {roots[0].id} has deprel {roots[0].deprel!r}, expected 'root'",
                self.sent_id,
            )
        for tok in self.tokens:
            if tok.head == tok.id:
                raise TreeValidationError(
                    f"token {tok.id} is its own head", self.sent_id
                )
            if tok.head != 0 and tok.head not in by_id:
                raise TreeValidationError(
                    f"token {tok.id} has unknown head {tok.head}", self.sent_id
                )
            children[tok.head].append(tok.id)
        # Single root + resolvable heads still admits cycles among non-root
        # tokens; walk up from every token to be sure.
        for tok in self.tokens:
            seen = set()
            cur = tok.id
            while cur != 0:
                if cur in seen:
                    raise TreeValidationError(
                        f"head cycle involving token {cur}", self.sent_id
                    )
                seen.add(cur)
                cur = by_id[cur].head
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})

    def token(self, token_id: int) -> Token:
        try:
            return self._by_id[token_id]
        except KeyError:
            raise UnknownTokenId(
                f"token id {token_id} not in sentence {self.sent_id!r}"
            ) from None

    def children(self, token_id: int) -> tuple[int, ...]:
        if token_id != 0 and token_id not in self._by_id:
            raise UnknownTokenId(
                f"token id {token_id} not in sentence {self.sent_id!r}"
            )
        return self._children[token_id]

    @property
    def root(self) -> Token:
        return self._by_id[self._children[0][0]]

    def __len__(self) -> int:
        return len(self.tokens)

    def depth(self, token_id: int) -> int:
        """Number of head links from the token up to the root (root -> 0)."""
        d = 0
        cur = self.token(token_id)
        while cur.head != 0:
            cur = self._by_id[cur.head]
            d += 1
        return d

    def ancestors(self, token_id: int) -> tuple[int, ...]:
        """Head chain from the token's head up to the root, innermost first."""
        out = []
        cur = self.token(token_id)
        while cur.head != 0:
            out.append(cur.head)
            cur = self._by_id[cur.head]
        return tuple(out)


def _iter_lines(source: str | IO[str] | Iterable[str]) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source


def parse_conllu(source: str | IO[str] | Iterable[str]) -> list[DepTree]:
    """Parse CoNLL-U text into validated trees.

    Multiword-token ranges (ids like "3-4") and empty nodes (ids like "3.1")
    are skipped: the splitting rules operate on basic syntactic words only.
    Missing ``# sent_id`` comments default to the 1-based block index.
    """
    trees: list[DepTree] = []
    sent_id: str | None = None
    text: str | None = None
    tokens: list[Token] = []
    saw_content = False

    def flush(block_index: int):
        nonlocal sent_id, text, tokens, saw_content
        if not saw_content:
            return
        sid = sent_id if sent_id is not None else str(block_index)
        stext = text if text is not None else " ".join(t.form for t in tokens)
        trees.append(DepTree(sent_id=sid, text=stext, tokens=tuple(tokens)))
        sent_id = None
        text = None
        tokens = []
        saw_content = False

    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line == "":
            flush(len(trees) + 1)
            continue
        if line.startswith("#"):
            saw_content = True
            comment = line[1:].strip()
            for key in ("sent_id", "text"):
                prefix = key + " ="
                alt = key + "="
                if comment.startswith(prefix) or comment.startswith(alt):
                    value = comment.split("=", 1)[1].strip()
                    if key == "sent_id":
                        sent_id = value
                    else:
                        text = value
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise ConlluParseError(
                f"expected {N_COLUMNS} tab-separated columns, got {len(cols)}", lineno
            )
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            saw_content = True
            continue
        try:
            idx = int(tok_id)
        except ValueError:
            raise ConlluParseError(f"non-integer token id {tok_id!r}", lineno) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluParseError(f"non-integer head {cols[6]!r}", lineno) from None
        if not cols[1]:
            raise ConlluParseError("empty form column", lineno)
        deprel = DEPREL_ALIASES.get(cols[7], cols[7])
        try:
            tokens.append(
                Token(id=idx, form=cols[1], lemma=cols[2], upos=cols[3], head=head, deprel=deprel)
            )
        except ValueError as exc:
            raise ConlluParseError(str(exc), lineno) from None
        saw_content = True

    flush(len(trees) + 1)
    return trees


def to_conllu(tree: DepTree) -> str:
    """Serialize a tree back to a CoNLL-U block (unknown columns stay "_")."""
    lines = [f"# sent_id = {tree.sent_id}", f"# text = {tree.text}"]
    for t in tree.tokens:
        lines.append(
            "\t".join(
                [str(t.id), t.form, t.lemma, t.upos, "_", "_", str(t.head), t.deprel, "_", "_"]
            )
        )
    return "\n".join(lines) + "\n"


def subtree_span(
    tree: DepTree, root_id: int, excluded_roots: Iterable[int] = ()
) -> TokenSpan:
    """All tokens reachable from ``root_id`` by head-child edges.

    Branches whose top node is in ``excluded_roots`` are pruned whole;
    ``root_id`` itself is always included.
    """
    excluded = set(excluded_roots)
    for i in excluded:
        tree.token(i)
    result = []
    stack = [tree.token(root_id).id]
    while stack:
        cur = stack.pop()
        result.append(cur)
        for child in tree.children(cur):
            if child not in excluded:
                stack.append(child)
    return TokenSpan.of(result)


def linearize(tree: DepTree, span: TokenSpan, drop: Iterable[int] = ()) -> str:
    """Surface realization of a span: forms in id order, lowercased.

    Dropped ids are removed first, then punctuation tokens are stripped from
    the leading and trailing edges. Raises EmptyAtomError when nothing
    survives.
    """
    dropset = set(drop)
    kept = [tree.token(i) for i in span if i not in dropset]
    while kept and kept[0].upos == "PUNCT":
        kept.pop(0)
    while kept and kept[-1].upos == "PUNCT":
        kept.pop()
    if not kept:
        raise EmptyAtomError(
            f"span in sentence {tree.sent_id!r} is empty after removals"
        )
    return " ".join(t.form.lower() for t in kept)

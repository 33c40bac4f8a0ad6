"""Sentence-per-line text to CoNLL-U.

The builtin backend is a deterministic heuristic grammar: a small POS
lexicon with suffix rules, then a single attachment pass in which function
words point forward to the content word they introduce and content words
point backward to their governing verb. Every head chain terminates at the
root, so the output always satisfies the downstream tree invariants. Pass
``spacy:<model>`` to use a real statistical parser when one is installed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*|[^\w\s]", re.UNICODE)

DETERMINERS = {"the", "a", "an", "this", "these", "those", "my", "his", "her", "its", "our", "their", "your", "each", "every", "some", "any", "no"}
AUXILIARIES = {"is", "am", "are", "was", "were", "be", "been", "being", "has", "have", "had", "will", "would", "can", "could", "shall", "should", "may", "might", "must", "do", "does", "did"}
ADPOSITIONS = {"in", "on", "at", "by", "for", "with", "from", "to", "of", "into", "onto", "over", "under", "near", "during", "through", "about", "against", "between", "as"}
COORDINATORS = {"and", "or", "but", "nor"}
SUBORDINATORS = {"because", "although", "though", "while", "when", "if", "since", "unless", "until", "whereas", "after", "before"}
PRONOUNS = {"i", "you", "he", "she", "it", "we", "they", "him", "them", "me", "us", "who", "whom", "which", "whose", "what", "that", "himself", "herself", "itself", "themselves", "myself"}
ADVERBS = {"not", "very", "also", "still", "only", "already", "often", "never", "always", "too", "well", "again", "away", "late", "soon"}
COMMON_VERBS = {
    "said", "says", "say", "sang", "sing", "sings", "ate", "eat", "eats", "ran",
    "run", "runs", "went", "go", "goes", "made", "make", "makes", "took", "take",
    "takes", "got", "get", "gets", "saw", "see", "sees", "came", "come", "comes",
    "gave", "give", "gives", "found", "find", "finds", "told", "tell", "tells",
    "left", "leave", "leaves", "put", "kept", "keep", "keeps", "began", "begin",
    "begins", "lost", "lose", "loses", "felt", "feel", "feels", "met", "meet",
    "meets", "paid", "pay", "pays", "sold", "sell", "sells", "bought", "buy",
    "buys", "brought", "bring", "brings", "thought", "think", "thinks", "wrote",
    "write", "writes", "read", "reads", "played", "play", "plays", "moved",
    "move", "moves", "lived", "live", "lives", "worked", "work", "works",
    "died", "die", "dies", "served", "serve", "serves", "won", "win", "wins",
    "held", "hold", "holds", "led", "lead", "leads", "stood", "stand", "stands",
    "sat", "sit", "sits", "grew", "grow", "grows", "knew", "know", "knows",
    "became", "become", "becomes", "danced", "dance", "dances", "walked",
    "walk", "walks", "stayed", "stay", "stays", "resigned", "resign", "clapped",
    "shone", "spoke", "speak", "speaks", "built", "build", "builds",
}
VERB_SUFFIXES = ("ed", "ing")


class AdapterError(RuntimeError):
    """A backend that cannot be loaded or used."""


@dataclass(frozen=True)
class AdapterConfig:
    parser_model: str = "builtin"
    embedding_model: str = "hashed-64"
    batch_size: int = 32

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def tokenize(line: str) -> list[str]:
    return TOKEN_RE.findall(line)


def tag(token: str, prev_tag: str | None) -> str:
    lowered = token.lower()
    if not any(ch.isalnum() for ch in token):
        return "PUNCT"
    if any(ch.isdigit() for ch in token):
        return "NUM"
    if lowered in DETERMINERS:
        return "DET"
    if lowered in AUXILIARIES:
        return "AUX"
    if lowered in COORDINATORS:
        return "CCONJ"
    if lowered in SUBORDINATORS:
        return "SCONJ"
    if lowered in ADPOSITIONS:
        return "ADP"
    if lowered in PRONOUNS:
        return "PRON"
    if lowered in ADVERBS:
        return "ADV"
    if lowered in COMMON_VERBS:
        return "VERB"
    if lowered.endswith(VERB_SUFFIXES) and len(lowered) > 4 and prev_tag in ("PRON", "NOUN", "PROPN", "AUX", "ADV", "SCONJ", "CCONJ", None):
        return "VERB"
    return "NOUN"


def _find_root(tags: list[str]) -> int:
    for pos, t in enumerate(tags):
        if t == "VERB":
            return pos
    for pos, t in enumerate(tags):
        if t == "AUX":
            return pos
    for pos in range(len(tags) - 1, -1, -1):
        if tags[pos] in ("NOUN", "PROPN", "NUM", "PRON"):
            return pos
    return 0


def _next_with(tags, start, wanted):
    for pos in range(start + 1, len(tags)):
        if tags[pos] in wanted:
            return pos
    return None


def _prev_with(tags, start, wanted):
    for pos in range(start - 1, -1, -1):
        if tags[pos] in wanted:
            return pos
    return None


def parse_line(line: str) -> list[tuple[int, str, str, int, str]]:
    """One sentence to rows of (id, form, upos, head, deprel).

    Function words attach forward to the content word they introduce;
    content words attach backward to their governing verb or to the root,
    which keeps the head graph a tree by construction.
    """
    forms = tokenize(line)
    if not forms:
        raise AdapterError("no tokens")
    tags: list[str] = []
    for form in forms:
        tags.append(tag(form, tags[-1] if tags else None))
    root = _find_root(tags)
    n = len(forms)
    heads = [0] * n
    deprels = ["dep"] * n
    pending_sconj: list[int] = []
    pending_cconj: list[int] = []
    seen_subject = False

    for pos in range(n):
        t = tags[pos]
        if pos == root:
            heads[pos] = -1
            deprels[pos] = "root"
            continue
        if t == "PUNCT":
            heads[pos] = root
            deprels[pos] = "punct"
        elif t == "DET":
            target = _next_with(tags, pos, {"NOUN", "PROPN", "NUM"})
            heads[pos] = target if target is not None else root
            deprels[pos] = "det" if target is not None else "dep"
        elif t == "ADP":
            target = _next_with(tags, pos, {"NOUN", "PROPN", "NUM", "PRON"})
            if target is not None:
                heads[pos] = target
                deprels[pos] = "case"
            else:
                heads[pos] = root
                deprels[pos] = "mark" if forms[pos].lower() == "to" else "dep"
        elif t == "SCONJ":
            target = _next_with(tags, pos, {"VERB", "AUX"})
            if target is not None and target != root:
                heads[pos] = target
                deprels[pos] = "mark"
                pending_sconj.append(target)
            else:
                heads[pos] = root
                deprels[pos] = "mark"
        elif t == "CCONJ":
            target = _next_with(tags, pos, {"VERB", "NOUN", "PROPN", "NUM", "PRON", "AUX"})
            if target is not None and target != root:
                heads[pos] = target
                deprels[pos] = "cc"
                pending_cconj.append(target)
            else:
                heads[pos] = root
                deprels[pos] = "cc"
        elif t == "AUX":
            target = _next_with(tags, pos, {"VERB"})
            heads[pos] = target if target is not None and target != pos else root
            deprels[pos] = "aux" if target is not None else "cop"
        elif t == "ADV":
            target = _next_with(tags, pos, {"VERB"})
            if target is None:
                target = _prev_with(tags, pos, {"VERB"})
            heads[pos] = target if target is not None and target != pos else root
            deprels[pos] = "advmod"
            if heads[pos] == pos:
                heads[pos] = root
        elif t == "VERB":
            if pos in pending_sconj:
                heads[pos] = root
                deprels[pos] = "advcl"
            elif pos in pending_cconj:
                prev_verb = _prev_with(tags, pos, {"VERB"})
                heads[pos] = prev_verb if prev_verb is not None else root
                deprels[pos] = "conj"
            elif pos > 0 and forms[pos - 1].lower() == "to":
                prev_verb = _prev_with(tags, pos, {"VERB"})
                heads[pos] = prev_verb if prev_verb is not None else root
                deprels[pos] = "xcomp"
            else:
                heads[pos] = root
                deprels[pos] = "advcl" if pos > root else "ccomp"
        else:  # NOUN / PROPN / NUM / PRON
            # Content words only ever attach to the root or to something
            # strictly earlier, which keeps the head graph acyclic.
            if pos in pending_cconj:
                prev_same = _prev_with(tags, pos, {"NOUN", "PROPN", "NUM", "PRON"})
                heads[pos] = prev_same if prev_same is not None else root
                deprels[pos] = "conj"
            elif pos < root and not seen_subject:
                heads[pos] = root
                deprels[pos] = "nsubj"
                seen_subject = True
            elif pos > 0 and tags[pos - 1] == "ADP":
                verb = _prev_with(tags, pos, {"VERB", "AUX"})
                heads[pos] = verb if verb is not None else root
                deprels[pos] = "obl"
            else:
                verb = _prev_with(tags, pos, {"VERB", "AUX"})
                if verb is not None and verb >= root:
                    heads[pos] = verb
                    deprels[pos] = "obj"
                else:
                    heads[pos] = root
                    deprels[pos] = "nmod" if pos < root else "obj"
        if heads[pos] == pos:
            heads[pos] = root

    rows = []
    for pos, form in enumerate(forms):
        head = 0 if pos == root else heads[pos] + 1
        rows.append((pos + 1, form, tags[pos], head, deprels[pos]))
    return rows


def rows_to_conllu(sent_id: str, text: str, rows, model_name: str) -> str:
    lines = [
        f"# sent_id = {sent_id}",
        f"# text = {text}",
        f"# parser = {model_name}",
    ]
    for idx, form, upos, head, deprel in rows:
        lines.append(
            "\t".join(
                [str(idx), form, form.lower(), upos, "_", "_", str(head), deprel, "_", "_"]
            )
        )
    return "\n".join(lines) + "\n"


def _parse_with_spacy(model_name: str, lines):
    try:
        import spacy
    except ImportError as exc:
        raise AdapterError(f"spacy backend requested but not installed: {model_name}") from exc
    try:
        nlp = spacy.load(model_name)
    except OSError as exc:
        raise AdapterError(f"cannot load spacy model {model_name!r}") from exc
    for line in lines:
        doc = nlp(line)
        rows = []
        tokens = [t for t in doc]
        for i, tok in enumerate(tokens, start=1):
            head = 0 if tok.head is tok else tokens.index(tok.head) + 1
            deprel = "root" if head == 0 else tok.dep_.lower()
            rows.append((i, tok.text, tok.pos_, head, deprel))
        yield rows


def parse_to_conllu(
    lines: list[str], config: AdapterConfig | None = None
) -> tuple[str, list[tuple[int, str]]]:
    """Parse one sentence per line; returns (document, error sidecar rows).

    Lines that cannot be parsed (including empty lines) go to the sidecar as
    (1-based line number, reason) and processing continues.
    """
    config = config or AdapterConfig()
    blocks: list[str] = []
    errors: list[tuple[int, str]] = []
    if config.parser_model.startswith("spacy:"):
        model = config.parser_model.split(":", 1)[1]
        usable = [(i, line) for i, line in enumerate(lines, start=1) if line.strip()]
        errors.extend((i, "empty line") for i, line in enumerate(lines, start=1) if not line.strip())
        parsed = _parse_with_spacy(model, [line for _, line in usable])
        for (lineno, line), rows in zip(usable, parsed):
            blocks.append(rows_to_conllu(str(lineno), line, rows, config.parser_model))
        return "\n".join(blocks), sorted(errors)
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            errors.append((lineno, "empty line"))
            continue
        try:
            rows = parse_line(line)
        except AdapterError as exc:
            errors.append((lineno, str(exc)))
            continue
        blocks.append(rows_to_conllu(str(lineno), line, rows, config.parser_model))
    return "\n".join(blocks), errors

"""Hand-built trees shared across test modules."""

from atomsplit.depgraph import DepTree, Token


def make_tree(rows, sent_id="t", text=None):
    """Build a tree from (form, upos, head, deprel) or (form, upos, head, deprel, lemma) rows."""
    tokens = []
    for i, row in enumerate(rows, start=1):
        form, upos, head, deprel = row[:4]
        lemma = row[4] if len(row) > 4 else form.lower()
        tokens.append(
            Token(id=i, form=form, lemma=lemma, upos=upos, head=head, deprel=deprel)
        )
    if text is None:
        text = " ".join(t.form for t in tokens)
    return DepTree(sent_id=sent_id, text=text, tokens=tuple(tokens))


def ids_by_form(tree, *forms):
    """First token id for each requested form."""
    out = []
    for form in forms:
        out.append(next(t.id for t in tree.tokens if t.form == form))
    return out if len(out) > 1 else out[0]


# "anna ate an apple and a banana", hand-checked against UD guidelines:
# "banana" attaches to "apple" via conj; "and" carries cc and hangs off the
# first conjunct (the attachment style of several production parsers).
BANANA_ROWS = [
    ("anna", "NOUN", 2, "nsubj"),
    ("ate", "VERB", 0, "root", "eat"),
    ("an", "DET", 4, "det"),
    ("apple", "NOUN", 2, "obj"),
    ("and", "CCONJ", 4, "cc"),
    ("a", "DET", 7, "det"),
    ("banana", "NOUN", 4, "conj"),
]

# "alice sang and danced": verbal conjunct, cc on the second conjunct
# (UD v2 attachment style).
SANG_DANCED_ROWS = [
    ("alice", "NOUN", 2, "nsubj"),
    ("sang", "VERB", 0, "root", "sing"),
    ("and", "CCONJ", 4, "cc"),
    ("danced", "VERB", 2, "conj", "dance"),
]

# "diana , who served as mayor , resigned": relative clause with both
# delimiting commas attached to the clause root.
DIANA_ROWS = [
    ("diana", "PROPN", 8, "nsubj"),
    (",", "PUNCT", 4, "punct"),
    ("who", "PRON", 4, "nsubj"),
    ("served", "VERB", 1, "relcl", "serve"),
    ("as", "ADP", 6, "case"),
    ("mayor", "NOUN", 4, "obl"),
    (",", "PUNCT", 4, "punct"),
    ("resigned", "VERB", 0, "root", "resign"),
]


def banana_tree():
    return make_tree(BANANA_ROWS, sent_id="banana")


def sang_danced_tree():
    return make_tree(SANG_DANCED_ROWS, sent_id="sang-danced")


def diana_tree():
    return make_tree(DIANA_ROWS, sent_id="diana")

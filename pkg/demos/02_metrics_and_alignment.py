"""The evaluation toolbox: ROUGE-1/2/L, the greedy embedding score, and
prediction-to-gold alignment.

Run: python demos/02_metrics_and_alignment.py
"""

import numpy as np

from atomsplit import (
    TokenEmbeddings,
    TokenSpan,
    align_atoms,
    metric_tokenize,
    rouge_l,
    rouge_n,
    semantic_score,
)
from atomsplit.splitter import AtomicSentence

# Tokenization behind every lexical metric: lowercase alphanumeric runs,
# apostrophes kept inside a word, punctuation gone.
print(metric_tokenize("Anna didn't eat the 12'' record."))

candidate = metric_tokenize("anna ate an apple")
reference = metric_tokenize("anna ate an apple and a banana")

# The candidate is a strict subset: perfect precision, reduced recall.
for name, score in [
    ("rouge-1", rouge_n(candidate, reference, 1)),
    ("rouge-2", rouge_n(candidate, reference, 2)),
    ("rouge-L", rouge_l(candidate, reference)),
]:
    print(f"{name}: P={score.precision:.4f} R={score.recall:.4f} F1={score.f1:.4f}")

# The semantic score matches each token to its most similar counterpart by
# cosine over unit vectors (negatives floored at zero).
e1 = np.array([1.0, 0.0])
e2 = np.array([0.0, 1.0])
cand = TokenEmbeddings(("good", "movie"), np.stack([e1, e2]))
ref = TokenEmbeddings(("good",), np.stack([e1]))
print("\nsemantic 2-vs-1:", semantic_score(cand, ref))

# Alignment greedily pairs predictions with gold atoms on the ROUGE-1 F1
# matrix; whatever remains unmatched pairs with an empty side and scores
# zero, so over- and under-production both hurt.
def atom(text):
    return AtomicSentence(text=text, source_sent_id="d", span=TokenSpan.of([1]), rules=())

pairs = align_atoms(
    [atom("she taught herself how to draw")],
    [
        "she taught herself to draw",
        "she began selling cartoons while still in high school",
    ],
)
for pair in pairs:
    left = pair.predicted.text if pair.predicted else "(unmatched)"
    right = pair.gold if pair.gold else "(unmatched)"
    print(f"\n  {left!r}  <->  {right!r}")
    print(f"  rouge-1 F1 = {pair.rouge1.f1:.4f}")

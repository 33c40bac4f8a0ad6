"""Walk through the core objects: parse a CoNLL-U block, inspect the tree,
and decompose a few sentences into atomic sentences.

Run: python demos/01_trees_and_splitting.py
"""

from atomsplit import (
    SplitConfig,
    decompose,
    detect_clause_sites,
    linearize,
    parse_conllu,
    split_sentence,
    subtree_span,
)

# A dependency-parsed sentence in CoNLL-U: ten tab-separated columns per
# token, one blank line between sentences. Only id/form/lemma/upos/head/
# deprel are consulted; the rest may stay "_".
DOC = """\
# sent_id = demo1
# text = anna ate an apple and a banana .
1\tanna\tanna\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\tate\teat\tVERB\t_\t_\t0\troot\t_\t_
3\tan\tan\tDET\t_\t_\t4\tdet\t_\t_
4\tapple\tapple\tNOUN\t_\t_\t2\tobj\t_\t_
5\tand\tand\tCCONJ\t_\t_\t4\tcc\t_\t_
6\ta\ta\tDET\t_\t_\t7\tdet\t_\t_
7\tbanana\tbanana\tNOUN\t_\t_\t4\tconj\t_\t_
8\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_

# sent_id = demo2
# text = diana , who served as mayor , resigned .
1\tdiana\tdiana\tPROPN\t_\t_\t8\tnsubj\t_\t_
2\t,\t,\tPUNCT\t_\t_\t4\tpunct\t_\t_
3\twho\twho\tPRON\t_\t_\t4\tnsubj\t_\t_
4\tserved\tserve\tVERB\t_\t_\t1\trelcl\t_\t_
5\tas\tas\tADP\t_\t_\t6\tcase\t_\t_
6\tmayor\tmayor\tNOUN\t_\t_\t4\tobl\t_\t_
7\t,\t,\tPUNCT\t_\t_\t4\tpunct\t_\t_
8\tresigned\tresign\tVERB\t_\t_\t0\troot\t_\t_
9\t.\t.\tPUNCT\t_\t_\t8\tpunct\t_\t_
"""

trees = parse_conllu(DOC)
banana, diana = trees

# Trees are validated on construction: contiguous ids, a single root,
# resolvable heads, no cycles.
print("root of demo1:", banana.root.form)
print("children of 'ate':", [banana.token(i).form for i in banana.children(2)])

# subtree_span walks head->child edges; exclusions prune whole branches.
span = subtree_span(banana, 2, excluded_roots={7})
print("span without the second conjunct:", [banana.token(i).form for i in span])
print("linearized:", linearize(banana, span, drop={5}))

# Rule anchors the splitter will fire on:
print("\nsites in demo1:", detect_clause_sites(banana))
print("sites in demo2:", detect_clause_sites(diana))

# The split itself. A coordinated object clones the clause per conjunct;
# a relative clause becomes its own atom with the pronoun replaced by its
# antecedent.
for tree in trees:
    print(f"\n{tree.sent_id}: {tree.text}")
    for atom in split_sentence(tree):
        trace = ", ".join(f"{r.rule.value}@{r.anchor}" for r in atom.rules) or "-"
        print(f"  {atom.text!r}   [{trace}]")

# decompose() additionally reports dropped tokens (conjunctions, commas,
# subordinators, relative pronouns) so nothing is lost silently.
outcome = decompose(diana)
print("\ndropped in demo2:", {diana.token(i).form: why for i, why in outcome.dropped.items()})

# Options: keep subordinators, split appositives, cap the atom count.
config = SplitConfig(max_atoms_per_sentence=1)
print("capped split:", [a.text for a in split_sentence(banana, config)])

from collections import Counter

import pytest

from atomsplit.depgraph import TokenSpan
from atomsplit.splitter import (
    AtomicSentence,
    Rule,
    SplitConfig,
    decompose,
    detect_clause_sites,
    propagate_subject,
    split_sentence,
)
from helpers import (
    banana_tree,
    diana_tree,
    ids_by_form,
    make_tree,
    sang_danced_tree,
)


def texts(atoms):
    return [a.text for a in atoms]


class TestDetectSites:
    def test_simple_sentence_has_no_sites(self):
        tree = make_tree([("anna", "NOUN", 2, "nsubj"), ("sang", "VERB", 0, "root")])
        assert detect_clause_sites(tree) == []

    def test_verbal_conjunct_is_coordinated_clause(self):
        tree = sang_danced_tree()
        danced = ids_by_form(tree, "danced")
        assert detect_clause_sites(tree) == [(danced, Rule.COORD_CLAUSE)]

    def test_nominal_conjunct_is_coordinated_phrase(self):
        tree = banana_tree()
        banana = ids_by_form(tree, "banana")
        assert detect_clause_sites(tree) == [(banana, Rule.COORD_PHRASE)]

    def test_nominal_conjunct_with_own_subject_is_clause(self):
        # "bob sang and mary happy" style: conj with its own nsubj child.
        tree = make_tree(
            [
                ("bob", "NOUN", 2, "nsubj"),
                ("sang", "VERB", 0, "root"),
                ("and", "CCONJ", 5, "cc"),
                ("mary", "NOUN", 5, "nsubj"),
                ("happy", "ADJ", 2, "conj"),
            ]
        )
        assert detect_clause_sites(tree) == [(5, Rule.COORD_CLAUSE)]

    def test_appositive_site_gated_by_config(self):
        tree = make_tree(
            [
                ("my", "PRON", 2, "nmod:poss"),
                ("brother", "NOUN", 5, "nsubj"),
                (",", "PUNCT", 4, "punct"),
                ("doctor", "NOUN", 2, "appos"),
                ("arrived", "VERB", 0, "root"),
            ]
        )
        assert detect_clause_sites(tree) == []
        enabled = SplitConfig(enable_appositive_rule=True)
        assert detect_clause_sites(tree, enabled) == [(4, Rule.APPOSITIVE)]

    def test_sites_ordered_by_anchor(self):
        tree = diana_tree()
        served = ids_by_form(tree, "served")
        assert detect_clause_sites(tree) == [(served, Rule.RELATIVE_CLAUSE)]


class TestCanonicalSplits:
    def test_coordinated_objects_distribute_the_verb(self):
        atoms = split_sentence(banana_tree())
        assert texts(atoms) == ["anna ate an apple", "anna ate a banana"]

    def test_coordinated_predicates_share_the_subject(self):
        atoms = split_sentence(sang_danced_tree())
        assert texts(atoms) == ["alice sang", "alice danced"]

    def test_relative_clause_gets_its_antecedent(self):
        atoms = split_sentence(diana_tree())
        assert texts(atoms) == ["diana resigned", "diana served as mayor"]

    def test_no_sites_identity_split(self):
        tree = make_tree([("anna", "NOUN", 2, "nsubj"), ("sang", "VERB", 0, "root")])
        atoms = split_sentence(tree)
        assert texts(atoms) == ["anna sang"]
        assert atoms[0].rules == ()

    def test_rule_traces(self):
        atoms = split_sentence(sang_danced_tree())
        danced = ids_by_form(sang_danced_tree(), "danced")
        assert [r.rule for r in atoms[0].rules] == [Rule.COORD_CLAUSE]
        assert [r.rule for r in atoms[1].rules] == [Rule.COORD_CLAUSE, Rule.SUBJECT_COPY]
        assert all(r.anchor == danced for r in atoms[0].rules)


class TestAdverbialClause:
    def tree(self):
        # "bob stayed home because he felt sick"
        return make_tree(
            [
                ("bob", "NOUN", 2, "nsubj"),
                ("stayed", "VERB", 0, "root", "stay"),
                ("home", "NOUN", 2, "obl"),
                ("because", "SCONJ", 6, "mark"),
                ("he", "PRON", 6, "nsubj"),
                ("felt", "VERB", 2, "advcl", "feel"),
                ("sick", "ADJ", 6, "xcomp"),
            ]
        )

    def test_subordinator_dropped_by_default(self):
        assert texts(split_sentence(self.tree())) == ["bob stayed home", "he felt sick"]

    def test_keep_subordinator(self):
        config = SplitConfig(keep_subordinator=True)
        assert texts(split_sentence(self.tree(), config)) == [
            "bob stayed home",
            "because he felt sick",
        ]

    def test_fronted_adverbial_clause_emitted_after_matrix(self):
        # "before anna sang , bob clapped"
        tree = make_tree(
            [
                ("before", "SCONJ", 3, "mark"),
                ("anna", "NOUN", 3, "nsubj"),
                ("sang", "VERB", 6, "advcl", "sing"),
                (",", "PUNCT", 3, "punct"),
                ("bob", "NOUN", 6, "nsubj"),
                ("clapped", "VERB", 0, "root", "clap"),
            ]
        )
        assert texts(split_sentence(tree)) == ["bob clapped", "anna sang"]


class TestAppositiveRule:
    def tree(self):
        return make_tree(
            [
                ("my", "PRON", 2, "nmod:poss"),
                ("brother", "NOUN", 6, "nsubj"),
                (",", "PUNCT", 5, "punct"),
                ("a", "DET", 5, "det"),
                ("doctor", "NOUN", 2, "appos"),
                ("arrived", "VERB", 0, "root", "arrive"),
                (".", "PUNCT", 6, "punct"),
            ]
        )

    def test_disabled_by_default_keeps_appositive_inline(self):
        assert texts(split_sentence(self.tree())) == ["my brother , a doctor arrived"]

    def test_enabled_extracts_copula_free_restatement(self):
        config = SplitConfig(enable_appositive_rule=True)
        assert texts(split_sentence(self.tree(), config)) == [
            "my brother arrived",
            "my brother a doctor",
        ]


class TestCoordPhrase:
    def test_three_conjuncts(self):
        # "anna ate an apple , a pear and a banana"
        tree = make_tree(
            [
                ("anna", "NOUN", 2, "nsubj"),
                ("ate", "VERB", 0, "root", "eat"),
                ("an", "DET", 4, "det"),
                ("apple", "NOUN", 2, "obj"),
                (",", "PUNCT", 7, "punct"),
                ("a", "DET", 7, "det"),
                ("pear", "NOUN", 4, "conj"),
                ("and", "CCONJ", 10, "cc"),
                ("a", "DET", 10, "det"),
                ("banana", "NOUN", 4, "conj"),
            ]
        )
        assert texts(split_sentence(tree)) == [
            "anna ate an apple",
            "anna ate a pear",
            "anna ate a banana",
        ]

    def test_coordinated_subjects(self):
        tree = make_tree(
            [
                ("anna", "NOUN", 4, "nsubj"),
                ("and", "CCONJ", 3, "cc"),
                ("bob", "NOUN", 1, "conj"),
                ("sang", "VERB", 0, "root", "sing"),
            ]
        )
        assert texts(split_sentence(tree)) == ["anna sang", "bob sang"]

    def test_cross_product_of_two_groups(self):
        # "anna and bob ate apples and pears"
        tree = make_tree(
            [
                ("anna", "NOUN", 4, "nsubj"),
                ("and", "CCONJ", 3, "cc"),
                ("bob", "NOUN", 1, "conj"),
                ("ate", "VERB", 0, "root", "eat"),
                ("apples", "NOUN", 4, "obj", "apple"),
                ("and", "CCONJ", 7, "cc"),
                ("pears", "NOUN", 5, "conj", "pear"),
            ]
        )
        assert texts(split_sentence(tree)) == [
            "anna ate apples",
            "anna ate pears",
            "bob ate apples",
            "bob ate pears",
        ]


class TestSubjectPropagation:
    def test_coordinated_clause_inherits_subject(self):
        tree = sang_danced_tree()
        danced, sang, alice = ids_by_form(tree, "danced", "sang", "alice")
        span = propagate_subject(tree, danced, [sang])
        assert span is not None and list(span) == [alice]

    def test_clone_clause_root_finds_its_own_subject(self):
        tree = banana_tree()
        ate, anna = ids_by_form(tree, "ate", "anna")
        span = propagate_subject(tree, ate, [ate])
        assert span is not None and list(span) == [anna]

    def test_no_subject_anywhere(self):
        tree = make_tree(
            [
                ("run", "VERB", 0, "root"),
                ("or", "CCONJ", 3, "cc"),
                ("walk", "VERB", 1, "conj"),
            ]
        )
        assert propagate_subject(tree, 3, [1]) is None

    def test_copied_subject_pruned_of_clause_sites(self):
        # "the man who ran sang and danced": danced inherits "the man",
        # not the relative clause hanging off it.
        tree = make_tree(
            [
                ("the", "DET", 2, "det"),
                ("man", "NOUN", 5, "nsubj"),
                ("who", "PRON", 4, "nsubj"),
                ("ran", "VERB", 2, "relcl", "run"),
                ("sang", "VERB", 0, "root", "sing"),
                ("and", "CCONJ", 7, "cc"),
                ("danced", "VERB", 5, "conj", "dance"),
            ]
        )
        atoms = split_sentence(tree)
        assert texts(atoms) == ["the man sang", "the man ran", "the man danced"]

    def test_passive_subject_counts(self):
        # "the ball was kicked and thrown"
        tree = make_tree(
            [
                ("the", "DET", 2, "det"),
                ("ball", "NOUN", 4, "nsubj:pass"),
                ("was", "AUX", 4, "aux:pass", "be"),
                ("kicked", "VERB", 0, "root", "kick"),
                ("and", "CCONJ", 6, "cc"),
                ("thrown", "VERB", 4, "conj", "throw"),
            ]
        )
        assert texts(split_sentence(tree)) == ["the ball was kicked", "the ball thrown"]

    def test_nested_clause_walks_to_nearest_subject(self):
        # "john said that mary sang and danced": danced gets mary, not john.
        tree = make_tree(
            [
                ("john", "PROPN", 2, "nsubj"),
                ("said", "VERB", 0, "root", "say"),
                ("that", "SCONJ", 5, "mark"),
                ("mary", "PROPN", 5, "nsubj"),
                ("sang", "VERB", 2, "ccomp", "sing"),
                ("and", "CCONJ", 7, "cc"),
                ("danced", "VERB", 5, "conj", "dance"),
            ]
        )
        atoms = split_sentence(tree)
        assert texts(atoms) == ["john said that mary sang", "mary danced"]


class TestRelativeClauseDetails:
    def test_object_pronoun_replaced_in_place(self):
        # "the man whom anna saw ran"
        tree = make_tree(
            [
                ("the", "DET", 2, "det"),
                ("man", "NOUN", 6, "nsubj"),
                ("whom", "PRON", 5, "obj"),
                ("anna", "NOUN", 5, "nsubj"),
                ("saw", "VERB", 2, "relcl", "see"),
                ("ran", "VERB", 0, "root", "run"),
            ]
        )
        assert texts(split_sentence(tree)) == ["the man ran", "the man anna saw"]

    def test_reduced_relative_without_pronoun(self):
        tree = make_tree(
            [
                ("the", "DET", 2, "det"),
                ("man", "NOUN", 5, "nsubj"),
                ("anna", "NOUN", 4, "nsubj"),
                ("saw", "VERB", 2, "relcl", "see"),
                ("ran", "VERB", 0, "root", "run"),
            ]
        )
        assert texts(split_sentence(tree)) == ["the man ran", "anna saw"]


class TestLimits:
    def test_atom_cap(self):
        tree = make_tree(
            [
                ("anna", "NOUN", 2, "nsubj"),
                ("ate", "VERB", 0, "root", "eat"),
                ("apples", "NOUN", 2, "obj", "apple"),
                (",", "PUNCT", 5, "punct"),
                ("pears", "NOUN", 3, "conj", "pear"),
                ("and", "CCONJ", 7, "cc"),
                ("plums", "NOUN", 3, "conj", "plum"),
            ]
        )
        assert len(split_sentence(tree)) == 3
        capped = split_sentence(tree, SplitConfig(max_atoms_per_sentence=1))
        assert texts(capped) == ["anna ate apples , pears and plums"]

    def test_short_conjunct_merges_back(self):
        # "run or walk": the one-token conjunct atom is below the minimum.
        tree = make_tree(
            [
                ("run", "VERB", 0, "root"),
                ("or", "CCONJ", 3, "cc"),
                ("walk", "VERB", 1, "conj"),
            ]
        )
        assert texts(split_sentence(tree)) == ["run or walk"]
        loose = split_sentence(tree, SplitConfig(min_atom_tokens=1))
        assert texts(loose) == ["run", "walk"]


class TestOutcomeInvariants:
    def trees(self):
        yield banana_tree()
        yield sang_danced_tree()
        yield diana_tree()
        yield make_tree([("anna", "NOUN", 2, "nsubj"), ("sang", "VERB", 0, "root")])

    def test_coverage_no_token_silently_lost(self):
        for tree in self.trees():
            outcome = decompose(tree)
            covered = {i for atom in outcome.atoms for i in atom.span}
            covered |= set(outcome.dropped)
            assert covered == {t.id for t in tree.tokens}, tree.sent_id

    def test_provenance_forms_come_from_source(self):
        for tree in self.trees():
            source = Counter(t.form.lower() for t in tree.tokens)
            for atom in decompose(tree).atoms:
                for word in atom.text.split(" "):
                    assert source[word] > 0, (tree.sent_id, word)

    def test_duplicates_justified_by_rules(self):
        for tree in self.trees():
            outcome = decompose(tree)
            seen: Counter = Counter()
            for atom in outcome.atoms:
                seen.update(atom.span)
            for atom in outcome.atoms:
                if any(i for i in atom.span if seen[i] > 1):
                    assert atom.rules, f"unjustified duplicate in {tree.sent_id}"

    def test_order_preservation_non_copied_tokens(self):
        for tree in self.trees():
            for atom in decompose(tree).atoms:
                ids = list(atom.span)
                assert ids == sorted(ids)

    def test_determinism(self):
        for tree in self.trees():
            assert split_sentence(tree) == split_sentence(tree)

    def test_idempotence_on_site_free_sentence(self):
        tree = make_tree([("anna", "NOUN", 2, "nsubj"), ("sang", "VERB", 0, "root")])
        first = split_sentence(tree)
        assert len(first) == 1
        again = split_sentence(tree)
        assert first == again


class TestConfigValidation:
    def test_bad_cap(self):
        with pytest.raises(ValueError):
            SplitConfig(max_atoms_per_sentence=0)

    def test_empty_atom_text_rejected(self):
        with pytest.raises(ValueError):
            AtomicSentence(text="", source_sent_id="x", span=TokenSpan.of([1]), rules=())

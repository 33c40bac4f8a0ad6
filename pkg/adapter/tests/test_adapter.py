import json
import subprocess
import sys

import numpy as np
import pytest

from sentadapter.embedding import embed_tokenize, embed_tokens, iter_atom_texts
from sentadapter.parsing import AdapterConfig, AdapterError, parse_line, parse_to_conllu

NAMES = ["anna", "bob", "mary", "john", "diana", "görtz", "nadal", "alice"]
VERBS = ["sang", "danced", "walked", "ran", "played", "worked", "stayed", "clapped"]
NOUNS = ["ball", "song", "book", "house", "apple", "garden", "letter", "road"]


def corpus_100():
    """100 deterministic raw sentences with varied structure."""
    lines = []
    for i in range(100):
        name = NAMES[i % len(NAMES)]
        verb = VERBS[i % len(VERBS)]
        verb2 = VERBS[(i + 3) % len(VERBS)]
        noun = NOUNS[i % len(NOUNS)]
        kind = i % 7
        if kind == 0:
            lines.append(f"{name} {verb} .")
        elif kind == 1:
            lines.append(f"{name} {verb} and {verb2} .")
        elif kind == 2:
            lines.append(f"the {noun} was {verb} by {name} .")
        elif kind == 3:
            lines.append(f"{name} {verb} the {noun} because they {verb2} .")
        elif kind == 4:
            lines.append(f"{name} {verb} the {noun} and the {NOUNS[(i + 1) % len(NOUNS)]} .")
        elif kind == 5:
            lines.append(f"in 1990 {name} {verb} near the {noun} .")
        else:
            lines.append(f"{name} , who {verb} , also {verb2} with {NAMES[(i + 1) % len(NAMES)]} .")
    return lines


def run_primary(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "atomsplit.cli", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


def run_adapter(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "sentadapter.cli", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


class TestBuiltinParser:
    def test_two_token_sentence(self):
        rows = parse_line("anna sang")
        assert [(r[0], r[1], r[3], r[4]) for r in rows] == [
            (1, "anna", 2, "nsubj"),
            (2, "sang", 0, "root"),
        ]

    def test_every_sentence_gets_one_root(self):
        for line in corpus_100():
            rows = parse_line(line)
            roots = [r for r in rows if r[3] == 0]
            assert len(roots) == 1, line
            assert roots[0][4] == "root"

    def test_head_chains_terminate(self):
        for line in corpus_100():
            rows = parse_line(line)
            heads = {r[0]: r[3] for r in rows}
            for start in heads:
                seen, cur = set(), start
                while cur != 0:
                    assert cur not in seen, line
                    seen.add(cur)
                    cur = heads[cur]

    def test_empty_lines_go_to_sidecar(self):
        document, errors = parse_to_conllu(["anna sang", "", "bob ran"])
        assert errors == [(2, "empty line")]
        assert document.count("# sent_id") == 2

    def test_count_preservation(self):
        document, errors = parse_to_conllu(corpus_100())
        assert document.count("# sent_id") == 100 - len(errors)
        assert not errors

    def test_model_recorded_in_comments(self):
        document, _ = parse_to_conllu(["anna sang"])
        assert "# parser = builtin" in document

    def test_missing_spacy_is_fatal_with_model_name(self):
        try:
            import spacy  # noqa: F401

            pytest.skip("spacy installed; fatal-path not reachable")
        except ImportError:
            pass
        config = AdapterConfig(parser_model="spacy:en_core_web_sm")
        with pytest.raises(AdapterError, match="en_core_web_sm"):
            parse_to_conllu(["anna sang"], config)


class TestRoundTrip:
    def test_primary_accepts_100_sentences(self, tmp_path):
        document, errors = parse_to_conllu(corpus_100())
        assert not errors
        conllu = tmp_path / "corpus.conllu"
        conllu.write_text(document, encoding="utf-8")
        proc = run_primary("split", str(conllu))
        assert proc.returncode == 0, proc.stderr
        atoms = [json.loads(line) for line in proc.stdout.splitlines()]
        assert len({a["sent_id"] for a in atoms}) == 100

    def test_parse_cli_writes_sidecar(self, tmp_path):
        infile = tmp_path / "lines.txt"
        infile.write_text("anna sang\n\nbob ran\n", encoding="utf-8")
        out = tmp_path / "out.conllu"
        proc = run_adapter("parse", "--in", str(infile), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
        sidecar = tmp_path / "out.conllu.errors"
        assert sidecar.read_text().startswith("2\t")

    def test_full_file_pipeline_with_embeddings(self, tmp_path):
        lines = ["anna sang", "bob walked home", "mary read the book"]
        infile = tmp_path / "lines.txt"
        infile.write_text("\n".join(lines) + "\n", encoding="utf-8")
        conllu = tmp_path / "corpus.conllu"
        assert run_adapter("parse", "--in", str(infile), "--out", str(conllu)).returncode == 0

        atoms_path = tmp_path / "atoms.jsonl"
        proc = run_primary("split", str(conllu))
        assert proc.returncode == 0, proc.stderr
        atoms_path.write_text(proc.stdout, encoding="utf-8")

        gold_path = tmp_path / "gold.jsonl"
        gold_path.write_text(
            "".join(
                json.dumps({"id": str(i), "source": line, "atoms": [line]}) + "\n"
                for i, line in enumerate(lines, start=1)
            ),
            encoding="utf-8",
        )
        texts_path = tmp_path / "texts.jsonl"
        texts_path.write_text(
            atoms_path.read_text(encoding="utf-8") + gold_path.read_text(encoding="utf-8"),
            encoding="utf-8",
        )
        emb_path = tmp_path / "emb.jsonl"
        assert run_adapter("embed", "--in", str(texts_path), "--out", str(emb_path)).returncode == 0

        report_path = tmp_path / "report.json"
        proc = run_primary(
            "eval",
            str(conllu),
            str(gold_path),
            "--embeddings",
            str(emb_path),
            "--report",
            str(report_path),
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert payload["semantic"]["all_pairs"]["f1"] == pytest.approx(1.0, abs=1e-6)
        assert payload["rouge"]["rouge1"]["all_pairs"]["f1"] == pytest.approx(1.0)


class TestEmbeddings:
    def test_self_similarity_is_one(self):
        doc = embed_tokens(["anna sang loudly"])
        row = json.loads(doc.splitlines()[0])
        vectors = np.asarray(row["vectors"])
        sim = vectors @ vectors.T
        precision = sim.max(axis=1).mean()
        recall = sim.max(axis=0).mean()
        assert abs(precision - 1.0) < 1e-6 and abs(recall - 1.0) < 1e-6

    def test_vector_count_matches_token_count(self):
        for text in ["anna sang", "the 12'' vinyl", "görtz was here"]:
            row = json.loads(embed_tokens([text]).splitlines()[0])
            assert len(row["vectors"]) == len(row["tokens"])
            assert row["tokens"] == embed_tokenize(text)

    def test_rows_are_unit_norm(self):
        row = json.loads(embed_tokens(["some words here"]).splitlines()[0])
        norms = np.linalg.norm(np.asarray(row["vectors"]), axis=1)
        assert np.abs(norms - 1.0).max() < 1e-9

    def test_deterministic(self):
        texts = ["anna sang", "bob ran"]
        assert embed_tokens(texts) == embed_tokens(texts)

    def test_accepts_gold_records_and_text_rows(self):
        lines = [
            json.dumps({"id": "x", "source": "s", "atoms": ["a b", "c d"]}),
            json.dumps({"text": "e f"}),
            json.dumps("g h"),
        ]
        assert iter_atom_texts(lines) == ["a b", "c d", "e f", "g h"]

    def test_unknown_model_fatal_with_name(self):
        with pytest.raises(AdapterError, match="nope"):
            embed_tokens(["x"], AdapterConfig(embedding_model="nope"))

    def test_batch_size_validated(self):
        with pytest.raises(ValueError):
            AdapterConfig(batch_size=0)

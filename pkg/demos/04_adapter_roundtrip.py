"""Secondary-component round trip, files and CLIs only: raw sentences ->
adapter parse -> atomsplit split -> adapter embed -> atomsplit eval with a
semantic table.

Run: python demos/04_adapter_roundtrip.py
(needs both packages installed: `pip install -e .` and `pip install -e adapter/`)
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

LINES = ["anna sang", "bob walked home", "mary read the book and the letter"]


def run(*args):
    proc = subprocess.run([sys.executable, "-m", *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(proc.stderr)
    return proc.stdout


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "lines.txt").write_text("\n".join(LINES) + "\n")

    run("sentadapter.cli", "parse", "--in", str(tmp / "lines.txt"), "--out", str(tmp / "c.conllu"))
    print("--- adapter parse ->", (tmp / "c.conllu").read_text().splitlines()[0])

    atoms = run("atomsplit.cli", "split", str(tmp / "c.conllu"))
    (tmp / "atoms.jsonl").write_text(atoms)
    print("--- atoms:")
    for line in atoms.splitlines():
        print("   ", json.loads(line)["text"])

    gold_lines = [
        json.dumps({"id": str(i), "source": s, "atoms": [s] if "and the" not in s else [
            "mary read the book", "mary read the letter"]})
        for i, s in enumerate(LINES, start=1)
    ]
    (tmp / "gold.jsonl").write_text("\n".join(gold_lines) + "\n")

    (tmp / "texts.jsonl").write_text(atoms + "\n".join(gold_lines) + "\n")
    run("sentadapter.cli", "embed", "--in", str(tmp / "texts.jsonl"), "--out", str(tmp / "emb.jsonl"))

    run(
        "atomsplit.cli", "eval", str(tmp / "c.conllu"), str(tmp / "gold.jsonl"),
        "--embeddings", str(tmp / "emb.jsonl"),
        "--report", str(tmp / "report.json"), "--report-text", str(tmp / "report.txt"),
    )
    print("\n--- evaluation report:")
    print((tmp / "report.txt").read_text())

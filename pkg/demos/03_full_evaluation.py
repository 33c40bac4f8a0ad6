"""End-to-end evaluation on the bundled 20-sentence corpus: split every
parse, align against gold atoms, score, classify errors, and print the
report tables.

Run: python demos/03_full_evaluation.py
"""

from pathlib import Path

from atomsplit import run_pipeline

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

report = run_pipeline(DATA / "fixture.conllu", DATA / "fixture_gold.jsonl")
report.self_check()

print(report.to_text())

# The same report as machine-readable JSON (aggregates are recomputable
# from the per-pair rows; the CLI exposes this via --report):
payload = report.to_dict()
print("pair rows:", len(payload["pairs"]))
worst = min(
    (row for row in payload["pairs"] if row["predicted"] and row["gold"]),
    key=lambda row: row["scores"]["rouge1"]["f1"],
)
print("hardest matched pair:")
print("  predicted:", worst["predicted"]["text"])
print("  gold:     ", worst["gold"])
print("  label:    ", worst["label"])

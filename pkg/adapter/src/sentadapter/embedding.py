"""Atom strings to per-token embedding JSONL.

The builtin backend derives a deterministic unit vector per token from a
blake2b digest, so identical tokens always embed identically and runs are
reproducible offline. Pass ``hf:<model>`` to pull contextual vectors from a
transformer when one is installed.
"""

from __future__ import annotations

import hashlib
import json
import re

import numpy as np

from .parsing import AdapterConfig, AdapterError

WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*", re.UNICODE)

HASHED_PREFIX = "hashed-"


def embed_tokenize(text: str) -> list[str]:
    return WORD_RE.findall(text.lower())


def _hashed_vector(token: str, dim: int) -> np.ndarray:
    raw = b""
    counter = 0
    while len(raw) < dim:
        h = hashlib.blake2b(token.encode("utf-8") + counter.to_bytes(2, "big"), digest_size=64)
        raw += h.digest()
        counter += 1
    values = np.frombuffer(raw[:dim], dtype=np.uint8).astype(np.float64)
    values -= 127.5
    norm = np.linalg.norm(values)
    if norm < 1e-9:
        values[0] = 1.0
        norm = 1.0
    return values / norm


def _embed_batch_hashed(texts: list[str], dim: int):
    for text in texts:
        tokens = embed_tokenize(text)
        vectors = np.stack([_hashed_vector(t, dim) for t in tokens]) if tokens else np.zeros((0, dim))
        yield tokens, vectors


def _embed_batch_hf(texts: list[str], model_name: str):
    try:
        import torch
        from transformers import AutoModel, AutoTokenizer
    except ImportError as exc:
        raise AdapterError(f"transformers backend requested but not installed: {model_name}") from exc
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModel.from_pretrained(model_name)
    except Exception as exc:
        raise AdapterError(f"cannot load embedding model {model_name!r}") from exc
    model.eval()
    with torch.no_grad():
        for text in texts:
            encoded = tokenizer(text, return_tensors="pt", truncation=True)
            hidden = model(**encoded).last_hidden_state[0]
            pieces = tokenizer.convert_ids_to_tokens(encoded["input_ids"][0])
            keep = [i for i, p in enumerate(pieces) if p not in tokenizer.all_special_tokens]
            vectors = hidden[keep].numpy().astype(np.float64)
            norms = np.linalg.norm(vectors, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            yield [pieces[i] for i in keep], vectors / norms


def iter_atom_texts(jsonl_lines) -> list[str]:
    """Atom texts from a JSONL file: objects with "text", gold records with
    "atoms", or bare JSON strings."""
    texts = []
    for lineno, line in enumerate(jsonl_lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
        except ValueError as exc:
            raise AdapterError(f"atoms line {lineno}: {exc}") from None
        if isinstance(row, str):
            texts.append(row)
        elif isinstance(row, dict) and "text" in row:
            texts.append(row["text"])
        elif isinstance(row, dict) and "atoms" in row:
            texts.extend(row["atoms"])
        else:
            raise AdapterError(f"atoms line {lineno}: no usable text field")
    return texts


def embed_tokens(texts: list[str], config: AdapterConfig | None = None) -> str:
    """Embed each distinct text, returning the token-embeddings JSONL document.

    Entries are keyed by the text itself; the first occurrence wins.
    """
    config = config or AdapterConfig()
    if not texts:
        raise AdapterError("no atom texts to embed")
    model = config.embedding_model
    distinct = list(dict.fromkeys(texts))
    lines = []
    for start in range(0, len(distinct), config.batch_size):
        batch = distinct[start : start + config.batch_size]
        if model.startswith(HASHED_PREFIX):
            try:
                dim = int(model[len(HASHED_PREFIX) :])
            except ValueError:
                raise AdapterError(f"cannot load embedding model {model!r}") from None
            produced = _embed_batch_hashed(batch, dim)
        elif model.startswith("hf:"):
            produced = _embed_batch_hf(batch, model.split(":", 1)[1])
        else:
            raise AdapterError(f"cannot load embedding model {model!r}")
        for text, (tokens, vectors) in zip(batch, produced):
            lines.append(
                json.dumps(
                    {
                        "id": text,
                        "tokens": tokens,
                        "vectors": [[float(x) for x in row] for row in vectors],
                    },
                    ensure_ascii=False,
                )
            )
    return "\n".join(lines) + "\n"

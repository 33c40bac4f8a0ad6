"""Raw-text corpora to CoNLL-U parses and token-embedding files."""

from .embedding import embed_tokenize, embed_tokens, iter_atom_texts
from .parsing import AdapterConfig, AdapterError, parse_line, parse_to_conllu, tokenize

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "embed_tokenize",
    "embed_tokens",
    "iter_atom_texts",
    "parse_line",
    "parse_to_conllu",
    "tokenize",
]

"""Readers for the text-side inputs: dependency parses, embeddings, tag vocabularies."""

from .dependency import (
    DependencyParse,
    EntityMention,
    ParseSet,
    Token,
    dump_parses,
    load_parses,
    validate_parse,
)
from .embeddings import (
    EmbeddingTable,
    OovKind,
    OovPolicy,
    load_embeddings,
    phrase_embedding,
    save_embeddings,
)
from .vocab import TagVocab

__all__ = [
    "DependencyParse",
    "EntityMention",
    "ParseSet",
    "Token",
    "dump_parses",
    "load_parses",
    "validate_parse",
    "EmbeddingTable",
    "OovKind",
    "OovPolicy",
    "load_embeddings",
    "phrase_embedding",
    "save_embeddings",
    "TagVocab",
]

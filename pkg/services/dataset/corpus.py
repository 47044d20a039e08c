"""The loaded inputs every command works from."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import structlog

from libs.graph_match.concept_graph import ConceptGraph, load_concept_graph
from libs.graph_match.graph_builder import RelationVocab
from libs.graph_match.parsers import EmbeddingTable, OovPolicy, ParseSet, TagVocab, load_embeddings, load_parses

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Corpus:
    """Concept graph, sentence parses, concept-phrase parses and word vectors."""

    concept_graph: ConceptGraph
    sentences: ParseSet
    concept_parses: ParseSet
    table: EmbeddingTable

    @property
    def deprels(self) -> frozenset[str]:
        return self.sentences.deprels | self.concept_parses.deprels

    def relation_vocab(self) -> RelationVocab:
        return RelationVocab(self.deprels)

    def pos_vocab(self) -> TagVocab:
        return TagVocab.from_parses(
            "pos", [*self.sentences.values(), *self.concept_parses.values()], "pos"
        )

    def ner_vocab(self) -> TagVocab:
        return TagVocab.from_parses(
            "ner", [*self.sentences.values(), *self.concept_parses.values()], "ner"
        )

    def concept_tokens(self, concept: str) -> list[str]:
        """Words of a concept: its parse if there is one, else its surface."""
        if concept in self.concept_parses:
            return self.concept_parses[concept].forms
        return list(self.concept_graph.node(concept).surface)


def load_corpus(
    concept_edges: str | Path,
    sentences: str | Path,
    concept_parses: str | Path,
    embeddings: str | Path,
    concept_nodes: str | Path | None = None,
    oov_policy: OovPolicy | None = None,
) -> Corpus:
    corpus = Corpus(
        concept_graph=load_concept_graph(concept_edges, concept_nodes),
        sentences=load_parses(sentences),
        concept_parses=load_parses(concept_parses),
        table=load_embeddings(embeddings, oov_policy),
    )
    logger.info(
        "corpus_loaded",
        concepts=len(corpus.concept_graph),
        sentences=len(corpus.sentences),
        concept_parses=len(corpus.concept_parses),
        vocabulary=len(corpus.table),
    )
    return corpus

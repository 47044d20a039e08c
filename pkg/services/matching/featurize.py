"""Turn concept-sentence pairs into model inputs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import structlog

from libs.graph_match.concept_graph import ConceptGraph, context_subgraph
from libs.graph_match.constants import ISA
from libs.graph_match.exceptions import ConstructionError
from libs.graph_match.graph_builder import HeteroGraph, RelationVocab, build_pair_graph, feature_width
from libs.graph_match.parsers import DependencyParse, EmbeddingTable, TagVocab, phrase_embedding
from libs.graph_match.rgcn import EdgeIndex
from services.dataset.corpus import Corpus
from services.dataset.pairs import PairExample

logger = structlog.get_logger(__name__)


class ModelKind(str, Enum):
    GRAPH_GRAPH = "graph-graph"
    GRAPH_SEQ = "graph-seq"
    SEQ_SEQ = "seq-seq"


@dataclass(frozen=True)
class GraphPairInput:
    """Pair graph with the rows to read as V_S and V_T."""

    edges: EdgeIndex
    features: np.ndarray
    sentence_node: int
    target_node: int


@dataclass(frozen=True)
class ContextInput:
    """Concept-graph context (isA / rev-isA) plus the mean sentence vector."""

    edges: EdgeIndex
    features: np.ndarray
    target_node: int
    sentence_vector: np.ndarray


@dataclass(frozen=True)
class SequencePairInput:
    concept_vector: np.ndarray
    sentence_vector: np.ndarray


ModelInput = GraphPairInput | ContextInput | SequencePairInput


def graph_pair_input(g: HeteroGraph) -> GraphPairInput:
    """Raises ConstructionError when the graph lacks its virtual nodes."""
    if g.sentence_node is None or g.target_concept_node is None:
        raise ConstructionError(
            "Pair graph has no sentence or target-concept virtual node",
            {"sentence_node": g.sentence_node, "target_node": g.target_concept_node},
        )
    return GraphPairInput(EdgeIndex.from_graph(g), g.features, g.sentence_node, g.target_concept_node)


def context_input(
    ctx: ConceptGraph, target: str, sentence: DependencyParse, table: EmbeddingTable
) -> ContextInput:
    """Encode ``ctx`` as a two-relation graph: child -> parent isA and its reverse."""
    vocab = RelationVocab.isa_only()
    isa, rev_isa = vocab.index(ISA), vocab.rev(vocab.index(ISA))
    ids = ctx.node_ids()
    position = {node_id: i for i, node_id in enumerate(ids)}
    if target not in position:
        raise ConstructionError(f"Target {target!r} is not in the context graph", {"target": target})

    src: list[int] = []
    rel: list[int] = []
    dst: list[int] = []
    for child, _, parent in ctx.edges:
        src += [position[child], position[parent]]
        rel += [isa, rev_isa]
        dst += [position[parent], position[child]]
    features = np.stack([phrase_embedding(table, ctx.node(n).surface) for n in ids])
    return ContextInput(
        EdgeIndex.build(len(ids), np.array(src), np.array(rel), np.array(dst)),
        features,
        position[target],
        phrase_embedding(table, sentence.forms),
    )


def sequence_input(concept: list[str], sentence: list[str], table: EmbeddingTable) -> SequencePairInput:
    return SequencePairInput(phrase_embedding(table, concept), phrase_embedding(table, sentence))


class PairFeaturizer:
    """Builds and caches model inputs for pairs drawn from one corpus.

    Vocabularies default to the corpus' own; pass the ones stored in a
    checkpoint to reproduce the feature layout a model was trained with.
    """

    def __init__(
        self,
        corpus: Corpus,
        kind: ModelKind,
        relation_vocab: RelationVocab | None = None,
        pos_vocab: TagVocab | None = None,
        ner_vocab: TagVocab | None = None,
        hops: int = 1,
    ):
        self.corpus = corpus
        self.kind = kind
        self.relation_vocab = relation_vocab or corpus.relation_vocab()
        self.pos_vocab = pos_vocab or corpus.pos_vocab()
        self.ner_vocab = ner_vocab or corpus.ner_vocab()
        self.hops = hops
        self._cache: dict[tuple[str, str], ModelInput] = {}

    @property
    def num_relations(self) -> int:
        if self.kind is ModelKind.GRAPH_SEQ:
            return len(RelationVocab.isa_only())
        return len(self.relation_vocab)

    @property
    def input_dim(self) -> int:
        table = self.corpus.table
        if self.kind is ModelKind.GRAPH_GRAPH:
            return feature_width(table, self.pos_vocab, self.ner_vocab)
        return table.dim

    def pair_graph(self, pair: PairExample) -> HeteroGraph:
        corpus = self.corpus
        return build_pair_graph(
            self._sentence(pair),
            pair.concept,
            corpus.concept_graph,
            corpus.concept_parses,
            self.relation_vocab,
            corpus.table,
            self.pos_vocab,
            self.ner_vocab,
            self.hops,
        )

    def featurize(self, pair: PairExample) -> ModelInput:
        key = (pair.concept, pair.sentence)
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        corpus = self.corpus
        sentence = self._sentence(pair)
        inp: ModelInput
        if self.kind is ModelKind.GRAPH_GRAPH:
            inp = graph_pair_input(self.pair_graph(pair))
        elif self.kind is ModelKind.GRAPH_SEQ:
            ctx = context_subgraph(corpus.concept_graph, pair.concept, set(), self.hops)
            inp = context_input(ctx, pair.concept, sentence, corpus.table)
        else:
            inp = sequence_input(corpus.concept_tokens(pair.concept), sentence.forms, corpus.table)
        self._cache[key] = inp
        return inp

    def featurize_all(self, pairs: list[PairExample]) -> list[ModelInput]:
        inputs = [self.featurize(p) for p in pairs]
        logger.debug("pairs_featurized", kind=self.kind.value, pairs=len(pairs))
        return inputs

    def _sentence(self, pair: PairExample) -> DependencyParse:
        try:
            return self.corpus.sentences[pair.sentence]
        except KeyError:
            raise ConstructionError(
                f"Pair {pair.pair_id!r} references unknown sentence {pair.sentence!r}",
                {"pair_id": pair.pair_id, "sentence": pair.sentence},
            ) from None

"""Heterogeneous pair-graph construction.

One graph is built per concept-sentence pair in five steps:

1. ``fuse_syntactic_graphs`` merges the dependency graphs of the sentence and
   of every context concept into one word graph (one node per surface form,
   multi-token named entities contracted into a single node).
2. ``add_virtual_nodes`` adds one hub per concept (linked to its words with
   isA) and one hub for the sentence (linked to its named entities with
   isNamedEntity).
3. ``attach_context`` maps the concept-graph context onto the graph, marking
   entity-concept links of shared entities as isVital.
4. ``add_reverse_relations`` adds the reversed companion of every edge.
5. ``assemble_features`` concatenates word vector, POS, NER and source one-hots.

Every step returns a new ``HeteroGraph``; inputs are never mutated.
"""

from __future__ import annotations

import copy
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
import structlog

from .concept_graph import ConceptGraph, NodeKind, context_subgraph
from .constants import (
    IS_NAMED_ENTITY,
    IS_VITAL,
    ISA,
    NONE_TAG,
    REVERSE_PREFIX,
    SOURCE_BOTH,
    SOURCE_CONCEPT,
    SOURCE_SENTENCE,
    SOURCE_TAGS,
    SPECIAL_RELATIONS,
)
from .exceptions import ConstructionError, ValidationError
from .parsers.dependency import DependencyParse
from .parsers.embeddings import EmbeddingTable, phrase_embedding
from .parsers.vocab import TagVocab

logger = structlog.get_logger(__name__)


class RelationVocab:
    """Base relations (dependency labels + special relations) and their reverses.

    Relation ``r < K`` is a base relation; ``r + K`` is its reverse, where K is
    the number of base relations.
    """

    def __init__(self, deprels: Iterable[str], special: Sequence[str] = SPECIAL_RELATIONS):
        labels = sorted(set(deprels))
        clash = set(labels) & set(special)
        if clash:
            raise ValidationError(
                f"Dependency labels clash with special relations: {sorted(clash)}",
                {"labels": sorted(clash)},
            )
        self.base_relations: tuple[str, ...] = tuple(labels) + tuple(special)
        self._index = {name: i for i, name in enumerate(self.base_relations)}

    @classmethod
    def isa_only(cls) -> RelationVocab:
        """The two-relation vocabulary {isA, rev-isA} of concept-graph-only encoders."""
        return cls((), special=(ISA,))

    @property
    def num_base(self) -> int:
        return len(self.base_relations)

    def __len__(self) -> int:
        return 2 * len(self.base_relations)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RelationVocab) and self.base_relations == other.base_relations

    def index(self, name: str) -> int:
        if name.startswith(REVERSE_PREFIX):
            return self.rev(self.index(name[len(REVERSE_PREFIX) :]))
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"Unknown relation {name!r}", {"relation": name}) from None

    def name(self, relation: int) -> str:
        self._check(relation)
        if relation < self.num_base:
            return self.base_relations[relation]
        return REVERSE_PREFIX + self.base_relations[relation - self.num_base]

    def rev(self, relation: int) -> int:
        self._check(relation)
        k = self.num_base
        return relation + k if relation < k else relation - k

    def is_reverse(self, relation: int) -> bool:
        self._check(relation)
        return relation >= self.num_base

    def _check(self, relation: int) -> None:
        if not 0 <= relation < len(self):
            raise ValidationError(
                f"Relation index {relation} out of range [0, {len(self)})", {"relation": relation}
            )


class HetNodeKind(str, Enum):
    WORD = "Word"
    VIRTUAL_CONCEPT = "VirtualConcept"
    VIRTUAL_SENTENCE = "VirtualSentence"


@dataclass(frozen=True)
class HetNode:
    """Node of a pair graph.

    ``phrase`` holds the words a virtual node stands for; ``ref`` is the
    concept id of a virtual concept node or the entity id of an entity node.
    """

    id: int
    kind: HetNodeKind
    word: str | None
    pos: str = NONE_TAG
    ner: str = NONE_TAG
    source: str = NONE_TAG
    phrase: tuple[str, ...] = ()
    ref: str | None = None
    feature: np.ndarray | None = field(default=None, compare=False, repr=False)


@dataclass
class HeteroGraph:
    """Typed multigraph of word and virtual nodes for one pair."""

    vocab: RelationVocab
    nodes: list[HetNode] = field(default_factory=list)
    edges: list[tuple[int, int, int]] = field(default_factory=list)
    target_concept_node: int | None = None
    sentence_node: int | None = None
    word_index: dict[str, int] = field(default_factory=dict)
    entity_nodes: dict[str, int] = field(default_factory=dict)
    concept_nodes: dict[str, int] = field(default_factory=dict)
    _edge_set: set[tuple[int, int, int]] = field(default_factory=set, repr=False)

    def copy(self) -> HeteroGraph:
        clone = copy.copy(self)
        clone.nodes = list(self.nodes)
        clone.edges = list(self.edges)
        clone.word_index = dict(self.word_index)
        clone.entity_nodes = dict(self.entity_nodes)
        clone.concept_nodes = dict(self.concept_nodes)
        clone._edge_set = set(self._edge_set)
        return clone

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def add_node(self, node_kind: HetNodeKind, word: str | None, **attrs: object) -> int:
        index = len(self.nodes)
        self.nodes.append(HetNode(index, node_kind, word, **attrs))  # type: ignore[arg-type]
        if node_kind is HetNodeKind.WORD and word is not None:
            self.word_index[word] = index
        return index

    def add_edge(self, src: int, relation: int, dst: int) -> bool:
        """Add ``(src, relation, dst)`` unless already present. Returns True if added."""
        triple = (src, relation, dst)
        if triple in self._edge_set:
            return False
        self._edge_set.add(triple)
        self.edges.append(triple)
        return True

    def has_edge(self, src: int, relation: int, dst: int) -> bool:
        return (src, relation, dst) in self._edge_set

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, relation, dst) as int64 arrays."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    @property
    def features(self) -> np.ndarray:
        """Row-stacked node features (requires ``assemble_features``)."""
        if any(node.feature is None for node in self.nodes):
            raise ConstructionError("Node features have not been assembled")
        return np.stack([node.feature for node in self.nodes])  # type: ignore[misc]


def _token_keys(parse: DependencyParse) -> list[str]:
    """Merge key of every token: its form, or the joined span of its named entity."""
    keys = []
    for i, token in enumerate(parse.tokens):
        mention = parse.mention_of(i)
        if mention is None:
            keys.append(token.form)
        else:
            keys.append(" ".join(parse.tokens[j].form for j in mention.span))
    return keys


def _span_head(parse: DependencyParse, start: int, end: int) -> int:
    for i in range(start, end):
        head = parse.tokens[i].head
        if head is None or not start <= head < end:
            return i
    return start


def fuse_syntactic_graphs(
    parses: Sequence[DependencyParse],
    vocab: RelationVocab,
    origins: Sequence[str] | None = None,
) -> HeteroGraph:
    """Merge dependency graphs into one word graph.

    Args:
        parses: Parses to fuse; by default the first one is the sentence and
            the rest are concept phrases
        vocab: Relation vocabulary the dependency labels index into
        origins: Optional SENTENCE/CONCEPT tag per parse

    Returns:
        Partial graph with one Word node per distinct surface form and one
        edge head -> dependent per dependency arc
    """
    if origins is None:
        origins = [SOURCE_SENTENCE] + [SOURCE_CONCEPT] * (len(parses) - 1)
    if len(origins) != len(parses):
        raise ConstructionError("origins and parses must have the same length")

    graph = HeteroGraph(vocab=vocab)
    for parse, origin in zip(parses, origins, strict=True):
        keys = _token_keys(parse)
        node_of: list[int] = []
        for i, (token, key) in enumerate(zip(parse.tokens, keys, strict=True)):
            mention = parse.mention_of(i)
            if mention is not None:
                head = parse.tokens[_span_head(parse, mention.start, mention.end)]
                pos, ner = head.pos, head.ner
            else:
                pos, ner = token.pos, token.ner

            existing = graph.word_index.get(key)
            if existing is None:
                existing = graph.add_node(HetNodeKind.WORD, key, pos=pos, ner=ner, source=origin)
            elif graph.nodes[existing].source not in (origin, SOURCE_BOTH):
                graph.nodes[existing] = replace(graph.nodes[existing], source=SOURCE_BOTH)
            if mention is not None and mention.entity_id not in graph.entity_nodes:
                graph.entity_nodes[mention.entity_id] = existing
                graph.nodes[existing] = replace(graph.nodes[existing], ref=mention.entity_id)
            node_of.append(existing)

        for i, token in enumerate(parse.tokens):
            if token.head is None:
                continue
            mention = parse.mention_of(i)
            if mention is not None and mention.start <= token.head < mention.end:
                continue  # arc inside a contracted entity
            graph.add_edge(node_of[token.head], vocab.index(token.deprel), node_of[i])
    return graph


@dataclass(frozen=True)
class ConceptPhrase:
    """A concept of the context together with its parsed phrase."""

    concept_id: str
    parse: DependencyParse


def add_virtual_nodes(
    g: HeteroGraph, concepts: Sequence[ConceptPhrase], sentence: DependencyParse
) -> HeteroGraph:
    """Add concept hubs (first concept = target) and the sentence hub.

    Raises:
        ConstructionError: If a concept word is missing from the fused graph
    """
    if not concepts:
        raise ConstructionError("At least the target concept is required")
    graph = g.copy()
    isa = graph.vocab.index(ISA)
    for phrase in concepts:
        node = graph.add_node(
            HetNodeKind.VIRTUAL_CONCEPT,
            None,
            source=SOURCE_CONCEPT,
            phrase=tuple(phrase.parse.forms),
            ref=phrase.concept_id,
        )
        graph.concept_nodes[phrase.concept_id] = node
        for key in _token_keys(phrase.parse):
            word_node = graph.word_index.get(key)
            if word_node is None:
                raise ConstructionError(
                    f"Word {key!r} of concept {phrase.concept_id!r} is not in the fused graph",
                    {"concept": phrase.concept_id, "word": key},
                )
            graph.add_edge(node, isa, word_node)
    graph.target_concept_node = graph.concept_nodes[concepts[0].concept_id]

    sentence_node = graph.add_node(
        HetNodeKind.VIRTUAL_SENTENCE,
        None,
        source=SOURCE_SENTENCE,
        phrase=tuple(sentence.forms),
        ref=sentence.id,
    )
    graph.sentence_node = sentence_node
    is_named_entity = graph.vocab.index(IS_NAMED_ENTITY)
    for mention in sentence.named_entities:
        key = " ".join(sentence.tokens[j].form for j in mention.span)
        word_node = graph.word_index.get(key)
        if word_node is None:
            raise ConstructionError(
                f"Entity {mention.entity_id!r} of sentence {sentence.id!r} is not in the fused graph",
                {"sentence": sentence.id, "entity": mention.entity_id},
            )
        graph.add_edge(sentence_node, is_named_entity, word_node)
    return graph


def attach_context(g: HeteroGraph, ctx: ConceptGraph, shared: set[str]) -> HeteroGraph:
    """Map the concept-graph context onto the pair graph.

    Every isA edge of ``ctx`` becomes an edge child -> parent between the
    corresponding nodes; entity -> concept edges of shared entities carry
    isVital instead of isA. Context entities the sentence does not mention get
    a Word node of their own.

    Raises:
        ConstructionError: If a context concept has no virtual node
    """
    graph = g.copy()
    isa = graph.vocab.index(ISA)
    is_vital = graph.vocab.index(IS_VITAL)

    def node_for(node_id: str) -> int:
        node = ctx.node(node_id)
        if node.kind is NodeKind.CONCEPT:
            if node_id not in graph.concept_nodes:
                raise ConstructionError(
                    f"Context concept {node_id!r} has no virtual node", {"concept": node_id}
                )
            return graph.concept_nodes[node_id]
        if node_id in graph.entity_nodes:
            return graph.entity_nodes[node_id]
        word = node.phrase
        index = graph.word_index.get(word)
        if index is None:
            index = graph.add_node(HetNodeKind.WORD, word, source=SOURCE_CONCEPT, ref=node_id)
        graph.entity_nodes[node_id] = index
        return index

    for child, _, parent in ctx.edges:
        relation = isa
        if ctx.kind(child) is NodeKind.ENTITY and child in shared:
            relation = is_vital
        graph.add_edge(node_for(child), relation, node_for(parent))
    return graph


def add_reverse_relations(g: HeteroGraph) -> HeteroGraph:
    """Add ``(w, rev(r), v)`` for every edge ``(v, r, w)``. Idempotent."""
    graph = g.copy()
    for src, relation, dst in list(graph.edges):
        graph.add_edge(dst, graph.vocab.rev(relation), src)
    return graph


def _word_vector(table: EmbeddingTable, word: str) -> np.ndarray:
    words = word.split(" ")
    if word in table or len(words) == 1:
        return table.lookup(word)
    return phrase_embedding(table, words)


def feature_width(table: EmbeddingTable, pos_vocab: TagVocab, ner_vocab: TagVocab) -> int:
    return table.dim + len(pos_vocab) + len(ner_vocab) + len(SOURCE_TAGS)


def assemble_features(
    g: HeteroGraph, table: EmbeddingTable, pos_vocab: TagVocab, ner_vocab: TagVocab
) -> HeteroGraph:
    """Attach ``[word vector | POS | NER | source]`` to every node.

    Raises:
        ValidationError: If a tag is outside its vocabulary
    """
    graph = g.copy()
    source_vocab = TagVocab("source", SOURCE_TAGS)
    for index, node in enumerate(graph.nodes):
        if node.kind is HetNodeKind.WORD:
            assert node.word is not None
            vector = _word_vector(table, node.word)
        else:
            vector = phrase_embedding(table, node.phrase)
        feature = np.concatenate(
            [
                vector,
                pos_vocab.one_hot(node.pos),
                ner_vocab.one_hot(node.ner),
                source_vocab.one_hot(node.source),
            ]
        )
        graph.nodes[index] = replace(node, feature=feature)
    return graph


def build_pair_graph(
    sentence: DependencyParse,
    target: str,
    concept_graph: ConceptGraph,
    concept_parses: Mapping[str, DependencyParse],
    vocab: RelationVocab,
    table: EmbeddingTable,
    pos_vocab: TagVocab,
    ner_vocab: TagVocab,
    hops: int = 1,
) -> HeteroGraph:
    """Run the full construction for one concept-sentence pair.

    Raises:
        ConstructionError: If a context concept has no parse
    """
    sentence_entities = {
        e for e in sentence.entity_ids if e in concept_graph and concept_graph.kind(e) is NodeKind.ENTITY
    }
    ctx = context_subgraph(concept_graph, target, sentence_entities, hops)
    shared = sentence_entities & set(ctx.node_ids(NodeKind.ENTITY))

    concept_ids = [target] + [c for c in ctx.node_ids(NodeKind.CONCEPT) if c != target]
    missing = [c for c in concept_ids if c not in concept_parses]
    if missing:
        raise ConstructionError(
            f"No parse for context concept(s) {missing}", {"concepts": missing, "target": target}
        )
    phrases = [ConceptPhrase(c, concept_parses[c]) for c in concept_ids]

    graph = fuse_syntactic_graphs([sentence] + [p.parse for p in phrases], vocab)
    graph = add_virtual_nodes(graph, phrases, sentence)
    graph = attach_context(graph, ctx, shared)
    graph = add_reverse_relations(graph)
    graph = assemble_features(graph, table, pos_vocab, ner_vocab)
    logger.debug(
        "pair_graph_built",
        sentence=sentence.id,
        target=target,
        nodes=graph.num_nodes,
        edges=len(graph.edges),
        shared=len(shared),
    )
    return graph


def dump_graph(g: HeteroGraph) -> str:
    """Stable text dump: node table then edge table, both sorted by id."""
    lines = ["# nodes", "id\tkind\tword\tpos\tner\tsource\tref"]
    for node in sorted(g.nodes, key=lambda n: n.id):
        lines.append(
            "\t".join(
                [
                    str(node.id),
                    node.kind.value,
                    node.word if node.word is not None else "-",
                    node.pos,
                    node.ner,
                    node.source,
                    node.ref or "-",
                ]
            )
        )
    lines += ["# edges", "src\trelation\tdst"]
    for src, relation, dst in sorted(g.edges):
        lines.append(f"{src}\t{g.vocab.name(relation)}\t{dst}")
    return "\n".join(lines) + "\n"


def write_graph_dump(g: HeteroGraph, path: str | Path) -> None:
    Path(path).write_text(dump_graph(g), encoding="utf-8")

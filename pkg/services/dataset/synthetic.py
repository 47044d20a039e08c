"""Synthetic corpus with a planted, negation-sensitive labeling rule.

The concept graph has topic concepts, leaf concepts under them, and entities
under the leaves (some with two-token names). Every concept phrase is
``adjective noun``. Each sentence has the shape::

    SUBJECT [not] VERB [not] [ADJ] OBJECT

with the subject an entity (``nsubj`` of the verb) and the object either a
plain noun or, sometimes, an entity of another leaf concept (``obj``). A
``not`` token (``neg``) attaches either to the subject or to the object.

A pair (concept, sentence) is labeled 1 iff an entity of the concept is
mentioned and no negation token sits in that entity's dependency
neighborhood. Since every sentence may contain a ``not`` either way, bag-of-
words features cannot separate the classes; the dependency structure can.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from libs.graph_match.concept_graph import (
    ConceptGraph,
    GraphNode,
    NodeKind,
    concepts_of,
    entities_of,
    save_concept_graph,
)
from libs.graph_match.constants import NONE_TAG
from libs.graph_match.exceptions import ArgumentError
from libs.graph_match.parsers import (
    DependencyParse,
    EmbeddingTable,
    EntityMention,
    ParseSet,
    Token,
    dump_parses,
    save_embeddings,
)

from .construction import save_labels
from .corpus import Corpus
from .pairs import PairExample, make_pair_id, write_pairs

logger = structlog.get_logger(__name__)

NEGATION_WORDS = frozenset({"not", "never", "no"})
NEGATION_DEPREL = "neg"
DEPRELS = ("amod", "compound", NEGATION_DEPREL, "nsubj", "obj", "root")

CONCEPT_ADJECTIVES = (
    "highly", "popular", "classic", "modern", "rare", "famous", "early", "late",
    "grand", "minor", "urban", "rural", "northern", "southern",
)
CONCEPT_NOUNS = (
    "series", "novels", "albums", "dramas", "painters", "singers", "bands", "cities",
    "rivers", "engines", "phones", "sports", "dishes", "festivals",
)
TOPIC_NOUNS = ("works", "places", "people", "goods", "events", "things", "media", "arts")
VERBS = ("likes", "praises", "buys", "watches", "reviews", "shares", "mentions", "hosts")
OBJECT_NOUNS = ("books", "songs", "games", "films", "shows", "boxes", "cards", "maps")
OBJECT_ADJECTIVES = ("heavy", "quiet", "bright", "cheap", "small", "old")
SYLLABLES = ("ka", "lo", "mi", "ru", "te", "zo", "vin", "dar", "el", "os", "qua", "ni", "bex", "tor", "su", "pa")

FILES = {
    "concept_edges": "concepts.edges",
    "concept_nodes": "concepts.nodes",
    "sentences": "sentences.parses",
    "concept_parses": "concept_phrases.parses",
    "embeddings": "embeddings.txt",
    "labels": "labels.tsv",
    "pairs": "pairs.jsonl",
}


class SyntheticConfig(BaseModel):
    """Size and mix of a synthetic corpus."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    num_concepts: int = Field(50, ge=2)
    num_sentences: int = Field(400, ge=1)
    entities_per_concept: int = Field(4, ge=1)
    leaves_per_topic: int = Field(9, ge=1)
    embedding_dim: int = Field(16, ge=1)
    negation_rate: float = Field(0.5, ge=0, le=1)
    distractor_rate: float = Field(0.5, ge=0, le=1)
    second_entity_rate: float = Field(0.2, ge=0, le=1)
    multi_token_rate: float = Field(0.3, ge=0, le=1)
    seed: int = 0


def is_negation(token: Token) -> bool:
    return token.deprel == NEGATION_DEPREL or token.form.lower() in NEGATION_WORDS


def planted_label(parse: DependencyParse, concept: str, g: ConceptGraph) -> Literal[0, 1]:
    """Independent checker of the labeling rule, reading only the parse and graph."""
    targets = entities_of(g, concept)
    for mention in parse.named_entities:
        if mention.entity_id not in targets:
            continue
        span = set(mention.span)
        neighborhood: set[int] = set()
        for i in span:
            neighborhood |= parse.neighbors(i)
        if not any(is_negation(parse.tokens[j]) for j in neighborhood - span):
            return 1
    return 0


@dataclass
class SyntheticCorpus:
    corpus: Corpus
    labels: dict[tuple[str, str], Literal[0, 1]]
    pairs: list[PairExample]

    def write(self, directory: str | Path) -> dict[str, Path]:
        """Write every file into ``directory``; returns the path of each."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = {key: out / name for key, name in FILES.items()}
        corpus = self.corpus
        save_concept_graph(corpus.concept_graph, paths["concept_edges"], paths["concept_nodes"])
        dump_parses(corpus.sentences, paths["sentences"], corpus.sentences.deprels)
        dump_parses(corpus.concept_parses, paths["concept_parses"], corpus.concept_parses.deprels)
        save_embeddings(corpus.table, paths["embeddings"])
        save_labels(self.labels, paths["labels"])
        write_pairs(self.pairs, paths["pairs"])
        logger.info("synthetic_corpus_written", directory=str(out), files=len(paths))
        return paths


class _Generator:
    def __init__(self, cfg: SyntheticConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)

    def pick(self, options: tuple[str, ...]) -> str:
        return options[int(self.rng.integers(len(options)))]

    def _names(self, count: int) -> list[str]:
        names: list[str] = []
        seen: set[str] = set()
        while len(names) < count:
            length = int(self.rng.integers(2, 4))
            name = "".join(self.pick(SYLLABLES) for _ in range(length))
            if name not in seen:
                seen.add(name)
                names.append(name)
        return names

    def concept_graph(self) -> tuple[ConceptGraph, dict[str, list[str]]]:
        cfg = self.cfg
        num_topics = max(1, -(-cfg.num_concepts // (cfg.leaves_per_topic + 1)))
        num_leaves = cfg.num_concepts - num_topics
        topic_phrases = list(itertools.product(CONCEPT_ADJECTIVES, TOPIC_NOUNS))
        leaf_phrases = list(itertools.product(CONCEPT_ADJECTIVES, CONCEPT_NOUNS))
        if num_topics > len(topic_phrases) or num_leaves > len(leaf_phrases):
            raise ArgumentError(f"num_concepts={cfg.num_concepts} exceeds the synthetic phrase inventory")
        topics = [topic_phrases[int(i)] for i in self.rng.choice(len(topic_phrases), num_topics, replace=False)]
        leaves = [leaf_phrases[int(i)] for i in self.rng.choice(len(leaf_phrases), num_leaves, replace=False)]

        nodes: list[GraphNode] = []
        edges: list[tuple[str, str]] = []
        topic_ids = ["_".join(t) for t in topics]
        nodes += [GraphNode(tid, NodeKind.CONCEPT, t) for tid, t in zip(topic_ids, topics, strict=True)]

        names = iter(self._names(num_leaves * cfg.entities_per_concept * 2))
        entities_by_leaf: dict[str, list[str]] = {}
        for k, leaf in enumerate(leaves):
            leaf_id = "_".join(leaf)
            nodes.append(GraphNode(leaf_id, NodeKind.CONCEPT, leaf))
            edges.append((leaf_id, topic_ids[k % num_topics]))
            entity_ids = []
            for _ in range(cfg.entities_per_concept):
                surface: tuple[str, ...] = (next(names),)
                if self.rng.random() < cfg.multi_token_rate:
                    surface = (surface[0], next(names))
                entity_id = "_".join(surface)
                nodes.append(GraphNode(entity_id, NodeKind.ENTITY, surface))
                edges.append((entity_id, leaf_id))
                entity_ids.append(entity_id)
            entities_by_leaf[leaf_id] = entity_ids
        return ConceptGraph.from_parts(nodes, edges), entities_by_leaf

    def sentence(self, sid: str, g: ConceptGraph, subject: str, obj_entity: str | None) -> DependencyParse:
        cfg = self.cfg
        negate_subject = self.rng.random() < cfg.negation_rate
        negate_object = not negate_subject and self.rng.random() < cfg.distractor_rate
        with_adjective = self.rng.random() < 0.5

        forms: list[str] = []
        pos: list[str] = []
        ner: list[str] = []
        heads: list[int | None] = []
        deprels: list[str] = []
        mentions: list[EntityMention] = []

        def add(form: str, tag: str, head: int | None, deprel: str, entity: bool = False) -> int:
            forms.append(form)
            pos.append(tag)
            ner.append("ENT" if entity else NONE_TAG)
            heads.append(head)
            deprels.append(deprel)
            return len(forms) - 1

        # heads are patched once the verb position is known
        subject_surface = g.node(subject).surface
        start = len(forms)
        for word in subject_surface:
            add(word, "PROPN", None, "compound", entity=True)
        subject_head = len(forms) - 1
        for i in range(start, subject_head):
            heads[i] = subject_head
        deprels[subject_head] = "nsubj"
        mentions.append(EntityMention(start, subject_head + 1, subject))
        if negate_subject:
            add("not", "PART", subject_head, NEGATION_DEPREL)

        verb = add(self.pick(VERBS), "VERB", None, "root")
        heads[subject_head] = verb

        object_tokens: list[int] = []
        if negate_object:
            object_tokens.append(add("not", "PART", None, NEGATION_DEPREL))
        if with_adjective:
            object_tokens.append(add(self.pick(OBJECT_ADJECTIVES), "ADJ", None, "amod"))
        if obj_entity is None:
            object_head = add(self.pick(OBJECT_NOUNS), "NOUN", verb, "obj")
        else:
            surface = g.node(obj_entity).surface
            obj_start = len(forms)
            for word in surface:
                add(word, "PROPN", None, "compound", entity=True)
            object_head = len(forms) - 1
            for i in range(obj_start, object_head):
                heads[i] = object_head
            heads[object_head] = verb
            deprels[object_head] = "obj"
            mentions.append(EntityMention(obj_start, object_head + 1, obj_entity))
        for i in object_tokens:
            heads[i] = object_head

        tokens = tuple(
            Token(f, p, n, h, d) for f, p, n, h, d in zip(forms, pos, ner, heads, deprels, strict=True)
        )
        return DependencyParse(sid, tokens, tuple(mentions))


def concept_phrase_parse(node: GraphNode) -> DependencyParse:
    """``adjective noun`` phrase: the noun is ROOT, the adjective its amod."""
    *modifiers, noun = node.surface
    tokens = [Token(word, "ADJ", NONE_TAG, len(modifiers), "amod") for word in modifiers]
    tokens.append(Token(noun, "NOUN", NONE_TAG, None, "root"))
    return DependencyParse(node.id, tuple(tokens))


def generate_synthetic(cfg: SyntheticConfig) -> SyntheticCorpus:
    """Deterministic in ``cfg`` (including ``cfg.seed``)."""
    gen = _Generator(cfg)
    g, entities_by_leaf = gen.concept_graph()
    leaves = sorted(entities_by_leaf)

    sentences: dict[str, DependencyParse] = {}
    width = len(str(cfg.num_sentences))
    for k in range(cfg.num_sentences):
        leaf = leaves[int(gen.rng.integers(len(leaves)))]
        subject = gen.pick(tuple(entities_by_leaf[leaf]))
        obj_entity = None
        if len(leaves) > 1 and gen.rng.random() < cfg.second_entity_rate:
            other = gen.pick(tuple(c for c in leaves if c != leaf))
            obj_entity = gen.pick(tuple(entities_by_leaf[other]))
        sid = f"s{k:0{width}d}"
        sentences[sid] = gen.sentence(sid, g, subject, obj_entity)

    concept_parses = {c: concept_phrase_parse(g.node(c)) for c in g.node_ids(NodeKind.CONCEPT)}

    vocabulary = sorted(
        {t.form for p in sentences.values() for t in p.tokens}
        | {t.form for p in concept_parses.values() for t in p.tokens}
    )
    vectors = gen.rng.uniform(-0.5, 0.5, size=(len(vocabulary), cfg.embedding_dim))
    table = EmbeddingTable(cfg.embedding_dim, dict(zip(vocabulary, vectors, strict=True)))

    labels: dict[tuple[str, str], Literal[0, 1]] = {}
    pairs: list[PairExample] = []
    for sid, parse in sentences.items():
        for concept in sorted({c for e in parse.entity_ids for c in concepts_of(g, e)}):
            label = planted_label(parse, concept, g)
            labels[(concept, sid)] = label
            pairs.append(PairExample(pair_id=make_pair_id(concept, sid), concept=concept, sentence=sid, label=label))

    corpus = Corpus(
        concept_graph=g,
        sentences=ParseSet(sentences, DEPRELS),
        concept_parses=ParseSet(concept_parses, DEPRELS),
        table=table,
    )
    logger.info(
        "synthetic_corpus_generated",
        concepts=len(g.node_ids(NodeKind.CONCEPT)),
        entities=len(g.node_ids(NodeKind.ENTITY)),
        sentences=len(sentences),
        pairs=len(pairs),
        positives=sum(1 for p in pairs if p.label == 1),
    )
    return SyntheticCorpus(corpus, labels, pairs)

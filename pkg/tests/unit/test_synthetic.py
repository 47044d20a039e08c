"""Unit tests for the synthetic corpus generator."""

from collections import Counter

import pytest

from libs.graph_match.concept_graph import NodeKind, load_concept_graph
from libs.graph_match.exceptions import ArgumentError
from libs.graph_match.parsers import load_embeddings, load_parses, validate_parse
from services.dataset import (
    SplitMode,
    SyntheticConfig,
    generate_synthetic,
    load_labels,
    make_splits,
    planted_label,
    read_pairs,
)
from services.dataset.synthetic import FILES, concept_phrase_parse
from tests.factories import make_graph, make_parse

pytestmark = pytest.mark.unit


class TestGenerator:
    """Test generate_synthetic."""

    def test_deterministic(self):
        cfg = SyntheticConfig(num_concepts=8, num_sentences=30, seed=11)

        first, second = generate_synthetic(cfg), generate_synthetic(cfg)

        assert first.pairs == second.pairs
        assert first.corpus.sentences == second.corpus.sentences
        assert first.corpus.table == second.corpus.table

    def test_seed_changes_corpus(self):
        first = generate_synthetic(SyntheticConfig(num_concepts=8, num_sentences=30, seed=1))
        second = generate_synthetic(SyntheticConfig(num_concepts=8, num_sentences=30, seed=2))

        assert first.corpus.sentences != second.corpus.sentences

    def test_graph_shape(self, small_synthetic):
        g = small_synthetic.corpus.concept_graph

        concepts = g.node_ids(NodeKind.CONCEPT)
        assert len(concepts) == 12
        assert len(g.node_ids(NodeKind.ENTITY)) == 3 * (12 - 2)
        for entity in g.node_ids(NodeKind.ENTITY):
            assert len(g.parents(entity)) == 1

    def test_parses_are_valid(self, small_synthetic):
        corpus = small_synthetic.corpus
        for parse in [*corpus.sentences.values(), *corpus.concept_parses.values()]:
            validate_parse(parse, corpus.sentences.deprels)

    def test_labels_follow_the_rule(self, small_synthetic):
        corpus = small_synthetic.corpus

        for pair in small_synthetic.pairs:
            parse = corpus.sentences[pair.sentence]
            assert pair.label == planted_label(parse, pair.concept, corpus.concept_graph)
            assert small_synthetic.labels[(pair.concept, pair.sentence)] == pair.label

    def test_both_classes_present(self, small_synthetic):
        labels = Counter(p.label for p in small_synthetic.pairs)

        assert labels[0] > 0
        assert labels[1] > 0

    def test_too_many_concepts(self):
        with pytest.raises(ArgumentError):
            generate_synthetic(SyntheticConfig(num_concepts=1000, num_sentences=1))

    def test_non_overlapped_split_is_feasible(self, small_synthetic):
        largest = max(Counter(p.concept for p in small_synthetic.pairs).values())

        pairs = make_splits(small_synthetic.pairs, SplitMode.NON_OVERLAPPED, val_size=largest, seed=0)

        assert {p.split.value for p in pairs} >= {"train", "val", "test"}


class TestPlantedLabel:
    """Test planted_label on hand-built parses."""

    @pytest.fixture
    def graph(self):
        return make_graph({"rare_bands": "rare bands"}, {"kalo": "kalo", "miru": "miru"}, [("kalo", "rare_bands")])

    def test_plain_mention(self, graph):
        parse = make_parse(
            "s",
            [("kalo", "PROPN", "ENT", 2, "nsubj"), ("likes", "VERB", "None", 0, "root"), ("maps", "NOUN", "None", 2, "obj")],
            entities=[(1, 1, "kalo")],
        )

        assert planted_label(parse, "rare_bands", graph) == 1

    def test_negated_subject(self, graph):
        parse = make_parse(
            "s",
            [
                ("kalo", "PROPN", "ENT", 3, "nsubj"),
                ("not", "PART", "None", 1, "neg"),
                ("likes", "VERB", "None", 0, "root"),
                ("maps", "NOUN", "None", 3, "obj"),
            ],
            entities=[(1, 1, "kalo")],
        )

        assert planted_label(parse, "rare_bands", graph) == 0

    def test_negation_elsewhere_is_a_distractor(self, graph):
        parse = make_parse(
            "s",
            [
                ("kalo", "PROPN", "ENT", 2, "nsubj"),
                ("likes", "VERB", "None", 0, "root"),
                ("not", "PART", "None", 4, "neg"),
                ("maps", "NOUN", "None", 2, "obj"),
            ],
            entities=[(1, 1, "kalo")],
        )

        assert planted_label(parse, "rare_bands", graph) == 1

    def test_other_entity_only(self, graph):
        parse = make_parse(
            "s",
            [("miru", "PROPN", "ENT", 2, "nsubj"), ("likes", "VERB", "None", 0, "root")],
            entities=[(1, 1, "miru")],
        )

        assert planted_label(parse, "rare_bands", graph) == 0

    def test_concept_phrase_parse(self, graph):
        parse = concept_phrase_parse(graph.node("rare_bands"))

        assert parse.forms == ["rare", "bands"]
        assert parse.tokens[0].head == 1
        assert parse.root == 1


class TestWrite:
    """Test SyntheticCorpus.write."""

    def test_files_load_back(self, small_synthetic, tmp_path):
        paths = small_synthetic.write(tmp_path / "out")

        assert set(paths) == set(FILES)
        g = load_concept_graph(paths["concept_edges"], paths["concept_nodes"])
        assert g.nodes == small_synthetic.corpus.concept_graph.nodes
        assert load_parses(paths["sentences"]) == small_synthetic.corpus.sentences
        assert load_embeddings(paths["embeddings"]) == small_synthetic.corpus.table
        assert load_labels(paths["labels"]) == small_synthetic.labels
        assert read_pairs(paths["pairs"]) == small_synthetic.pairs

    def test_rewrite_is_byte_identical(self, small_synthetic, tmp_path):
        first = small_synthetic.write(tmp_path / "a")
        second = small_synthetic.write(tmp_path / "b")

        for key in FILES:
            assert first[key].read_bytes() == second[key].read_bytes()

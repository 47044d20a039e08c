"""Unit tests for the concept graph: loading, queries and context subgraphs."""

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from libs.graph_match.concept_graph import (
    ConceptGraph,
    GraphNode,
    NodeKind,
    concepts_of,
    context_subgraph,
    entities_of,
    load_concept_graph,
    save_concept_graph,
)
from libs.graph_match.exceptions import ArgumentError, NodeNotFoundError, ParseError, ValidationError
from tests.factories import make_graph

pytestmark = pytest.mark.unit


@pytest.fixture
def marvel_graph() -> ConceptGraph:
    return make_graph(
        concepts={"TheAvengers": "The Avengers", "MarvelSuperheroes": "Marvel Superheroes", "Empty": "empty"},
        entities={"CaptainAmerica": "Captain America", "IronMan": "Iron Man", "BlackWidow": "Black Widow"},
        edges=[
            ("CaptainAmerica", "TheAvengers"),
            ("IronMan", "TheAvengers"),
            ("BlackWidow", "TheAvengers"),
            ("TheAvengers", "MarvelSuperheroes"),
        ],
    )


class TestLoadConceptGraph:
    """Test load_concept_graph and save_concept_graph."""

    def test_edge_list_without_node_file(self, tmp_path):
        """Kinds are inferred: parents are Concepts, the rest Entities."""
        path = tmp_path / "g.edges"
        path.write_text("CaptainAmerica isA TheAvengers\nTheAvengers\tisA\tMarvelSuperheroes\n")

        g = load_concept_graph(path)

        assert len(g) == 3
        assert len(g.edges) == 2
        assert g.kind("CaptainAmerica") is NodeKind.ENTITY
        assert g.kind("TheAvengers") is NodeKind.CONCEPT

    def test_empty_file_gives_empty_graph(self, tmp_path):
        path = tmp_path / "empty.edges"
        path.write_text("")

        g = load_concept_graph(path)

        assert len(g) == 0
        assert g.edges == []

    def test_self_loop_rejected(self, tmp_path):
        path = tmp_path / "loop.edges"
        path.write_text("A\tisA\tA\n")

        with pytest.raises(ValidationError, match="Self-loop"):
            load_concept_graph(path)

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("# comment\nA\tisA\tB\nC\tpartOf\tB\n")

        with pytest.raises(ParseError) as exc_info:
            load_concept_graph(path)

        assert exc_info.value.line_number == 3

    def test_dangling_endpoint_with_node_file(self, tmp_path):
        nodes = tmp_path / "g.nodes"
        nodes.write_text("A\tConcept\ta\n")
        edges = tmp_path / "g.edges"
        edges.write_text("B\tisA\tA\n")

        with pytest.raises(ValidationError, match="not a declared node"):
            load_concept_graph(edges, nodes)

    def test_duplicate_edges_collapse(self, tmp_path):
        path = tmp_path / "dup.edges"
        path.write_text("x\tisA\tC\nx\tisA\tC\n")

        assert len(load_concept_graph(path).edges) == 1

    def test_entity_cannot_be_parent(self):
        nodes = [GraphNode("e", NodeKind.ENTITY, ("e",)), GraphNode("f", NodeKind.ENTITY, ("f",))]
        with pytest.raises(ValidationError, match="cannot be the parent"):
            ConceptGraph.from_parts(nodes, [("f", "e")])

    def test_save_then_load_preserves_graph(self, marvel_graph, tmp_path):
        edges, nodes = tmp_path / "g.edges", tmp_path / "g.nodes"
        save_concept_graph(marvel_graph, edges, nodes)

        loaded = load_concept_graph(edges, nodes)

        assert loaded.nodes == marvel_graph.nodes
        assert loaded.edges == marvel_graph.edges


class TestQueries:
    """Test entities_of and concepts_of."""

    def test_entities_of(self, marvel_graph):
        assert entities_of(marvel_graph, "TheAvengers") == {"CaptainAmerica", "IronMan", "BlackWidow"}

    def test_entities_of_concept_without_entities(self, marvel_graph):
        assert entities_of(marvel_graph, "MarvelSuperheroes") == set()

    def test_entities_of_rejects_entity(self, marvel_graph):
        with pytest.raises(NodeNotFoundError):
            entities_of(marvel_graph, "IronMan")

    def test_entities_of_unknown(self, marvel_graph):
        with pytest.raises(NodeNotFoundError):
            entities_of(marvel_graph, "Nobody")

    def test_concepts_of(self, marvel_graph):
        assert concepts_of(marvel_graph, "IronMan") == {"TheAvengers"}

    def test_entities_of_matches_edge_scan(self, marvel_graph):
        for concept in marvel_graph.node_ids(NodeKind.CONCEPT):
            scanned = {
                c for c, _, p in marvel_graph.edges if p == concept and marvel_graph.kind(c) is NodeKind.ENTITY
            }
            assert entities_of(marvel_graph, concept) == scanned


class TestContextSubgraph:
    """Test context_subgraph."""

    def test_one_hop_around_target(self, marvel_graph):
        ctx = context_subgraph(marvel_graph, "TheAvengers", {"CaptainAmerica"}, hops=1)

        assert set(ctx.node_ids()) == {
            "TheAvengers",
            "MarvelSuperheroes",
            "CaptainAmerica",
            "IronMan",
            "BlackWidow",
        }
        assert ("TheAvengers", "isA", "MarvelSuperheroes") in ctx.edges
        assert len(ctx.edges) == 4

    def test_isolated_concept(self, marvel_graph):
        ctx = context_subgraph(marvel_graph, "Empty", set())

        assert ctx.node_ids() == ["Empty"]

    def test_two_hops_reach_grandparent(self):
        g = make_graph({"a": "a", "b": "b", "c": "c"}, {}, [("a", "b"), ("b", "c")])

        assert "c" not in context_subgraph(g, "a", set(), hops=1)
        assert "c" in context_subgraph(g, "a", set(), hops=2)

    def test_siblings_excluded_at_one_hop(self):
        g = make_graph({"a": "a", "b": "b", "top": "top"}, {}, [("a", "top"), ("b", "top")])

        assert "b" not in context_subgraph(g, "a", set(), hops=1)

    def test_shared_entity_brings_its_concepts(self, series_graph):
        ctx = context_subgraph(series_graph, "highly_rated_series", {"next_stop_happiness"})

        assert "popular_dramas" in ctx
        assert "reset" not in ctx

    def test_invalid_hops(self, marvel_graph):
        with pytest.raises(ArgumentError) as exc_info:
            context_subgraph(marvel_graph, "TheAvengers", set(), hops=0)

        assert exc_info.value.exit_code == 2
        assert exc_info.value.details == {"hops": 0}

    @settings(max_examples=50, deadline=None)
    @given(
        parents=st.lists(st.integers(min_value=0, max_value=7), min_size=8, max_size=8),
        target=st.integers(min_value=0, max_value=7),
        hops=st.integers(min_value=1, max_value=3),
    )
    def test_monotone_in_hops_and_matches_bfs(self, parents, target, hops):
        """Random forests of concepts: the hop rule equals an undirected BFS."""
        ids = [f"c{i}" for i in range(8)]
        edges = [(ids[i], ids[p]) for i, p in enumerate(parents) if p < i]
        g = make_graph({c: c for c in ids}, {}, edges)

        ctx = context_subgraph(g, ids[target], set(), hops)
        wider = context_subgraph(g, ids[target], set(), hops + 1)

        undirected = nx.Graph(edges)
        undirected.add_nodes_from(ids)
        expected = set(nx.single_source_shortest_path_length(undirected, ids[target], cutoff=hops))
        assert set(ctx.node_ids()) == expected
        assert set(ctx.node_ids()) <= set(wider.node_ids())

"""Concept graph: an isA ontology of concepts and entities.

Edges point child -> parent (subordinate -> superordinate). Entities are
leaves: they are never the parent of an isA edge. The graph is backed by a
frozen ``networkx.DiGraph`` so it can be shared read-only across workers.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import networkx as nx
import structlog

from .constants import COMMENT_PREFIX, ISA
from .exceptions import ArgumentError, NodeNotFoundError, ParseError, ValidationError

logger = structlog.get_logger(__name__)


class NodeKind(str, Enum):
    """Kind of a concept graph node."""

    CONCEPT = "Concept"
    ENTITY = "Entity"


@dataclass(frozen=True)
class GraphNode:
    """A concept or entity with the words of its phrase."""

    id: str
    kind: NodeKind
    surface: tuple[str, ...]

    @property
    def phrase(self) -> str:
        return " ".join(self.surface)


def _default_surface(node_id: str) -> tuple[str, ...]:
    words = tuple(w for w in re.split(r"[\s_]+", node_id) if w)
    return words or (node_id,)


class ConceptGraph:
    """Validated, immutable isA graph.

    Use ``ConceptGraph.from_parts`` to build one in code and
    ``load_concept_graph`` to read one from disk.
    """

    def __init__(self, graph: nx.DiGraph):
        self._graph = nx.freeze(graph)

    @classmethod
    def from_parts(
        cls, nodes: Iterable[GraphNode], edges: Iterable[tuple[str, str]]
    ) -> ConceptGraph:
        """Build and validate a graph from nodes and (child, parent) pairs.

        Raises:
            ValidationError: If any invariant of the ontology is violated
        """
        graph = nx.DiGraph()
        for node in nodes:
            if node.id in graph:
                raise ValidationError(f"Duplicate node id {node.id!r}", {"node": node.id})
            if not node.surface:
                raise ValidationError(f"Node {node.id!r} has an empty surface", {"node": node.id})
            graph.add_node(node.id, data=node)

        for child, parent in edges:
            if child == parent:
                raise ValidationError(
                    f"Self-loop isA edge on {child!r}", {"child": child, "parent": parent}
                )
            for endpoint in (child, parent):
                if endpoint not in graph:
                    raise ValidationError(
                        f"Edge endpoint {endpoint!r} is not a declared node",
                        {"child": child, "parent": parent},
                    )
            if graph.nodes[parent]["data"].kind is NodeKind.ENTITY:
                raise ValidationError(
                    f"Entity {parent!r} cannot be the parent of an isA edge",
                    {"child": child, "parent": parent},
                )
            # duplicate lines collapse silently
            graph.add_edge(child, parent, relation=ISA)
        return cls(graph)

    # -- read-only accessors -------------------------------------------------

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._graph

    def __len__(self) -> int:
        return int(self._graph.number_of_nodes())

    @property
    def nodes(self) -> set[GraphNode]:
        return {data for _, data in self._graph.nodes(data="data")}

    @property
    def edges(self) -> list[tuple[str, str, str]]:
        """Edges as (child, relation, parent), sorted."""
        return sorted((c, ISA, p) for c, p in self._graph.edges())

    @property
    def nx_graph(self) -> nx.DiGraph:
        return self._graph

    def node(self, node_id: str) -> GraphNode:
        if node_id not in self._graph:
            raise NodeNotFoundError(f"Unknown node {node_id!r}", {"node": node_id})
        data: GraphNode = self._graph.nodes[node_id]["data"]
        return data

    def kind(self, node_id: str) -> NodeKind:
        return self.node(node_id).kind

    def node_ids(self, kind: NodeKind | None = None) -> list[str]:
        return sorted(
            n for n, data in self._graph.nodes(data="data") if kind is None or data.kind is kind
        )

    def parents(self, node_id: str) -> set[str]:
        self.node(node_id)
        return set(self._graph.successors(node_id))

    def children(self, node_id: str) -> set[str]:
        self.node(node_id)
        return set(self._graph.predecessors(node_id))

    def subgraph(self, node_ids: Iterable[str]) -> ConceptGraph:
        """Induced subgraph over ``node_ids`` (all edges among them kept)."""
        return ConceptGraph(self._graph.subgraph(set(node_ids)).copy())


# -- queries -----------------------------------------------------------------


def _require_concept(g: ConceptGraph, node_id: str) -> GraphNode:
    node = g.node(node_id)
    if node.kind is not NodeKind.CONCEPT:
        raise NodeNotFoundError(
            f"{node_id!r} is an {node.kind.value}, expected a Concept",
            {"node": node_id, "kind": node.kind.value},
        )
    return node


def entities_of(g: ConceptGraph, concept: str) -> set[str]:
    """Entities with a direct isA edge to ``concept``.

    Raises:
        NodeNotFoundError: If ``concept`` is unknown or not a Concept
    """
    _require_concept(g, concept)
    return {c for c in g.children(concept) if g.kind(c) is NodeKind.ENTITY}


def concepts_of(g: ConceptGraph, entity: str) -> set[str]:
    """Concepts an entity (or concept) is directly isA of."""
    return {p for p in g.parents(entity) if g.kind(p) is NodeKind.CONCEPT}


def context_subgraph(
    g: ConceptGraph, target: str, shared_entities: set[str], hops: int = 1
) -> ConceptGraph:
    """Local concept-graph context of ``target`` for one concept-sentence pair.

    Nodes kept: the target, every concept within ``hops`` isA steps of it
    (either direction, through concepts only), the target's entities, the
    shared entities that exist in ``g`` and every concept adjacent to a shared
    entity. Edges: all isA edges among the kept nodes.

    Raises:
        NodeNotFoundError: If ``target`` is unknown or not a Concept
        ArgumentError: If ``hops`` < 1
    """
    _require_concept(g, target)
    if hops < 1:
        raise ArgumentError(f"hops must be >= 1, got {hops}", {"hops": hops})

    concept_ids = g.node_ids(NodeKind.CONCEPT)
    concept_view = g.nx_graph.subgraph(concept_ids).to_undirected(as_view=True)
    within = nx.single_source_shortest_path_length(concept_view, target, cutoff=hops)

    keep: set[str] = set(within)
    keep |= entities_of(g, target)
    for entity in sorted(shared_entities):
        if entity not in g:
            continue
        keep.add(entity)
        keep |= concepts_of(g, entity)

    sub = g.subgraph(keep)
    logger.debug(
        "context_subgraph",
        target=target,
        hops=hops,
        nodes=len(sub),
        edges=len(sub.edges),
    )
    return sub


# -- file I/O ----------------------------------------------------------------


def _content_lines(path: Path) -> Iterable[tuple[int, str]]:
    with path.open(encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith(COMMENT_PREFIX):
                continue
            yield line_number, line


def _read_nodes(path: Path) -> list[GraphNode]:
    nodes: list[GraphNode] = []
    for line_number, line in _content_lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"expected 3 tab-separated fields (id, kind, surface), got {len(fields)}",
                str(path),
                line_number,
            )
        node_id, kind_raw, surface_raw = fields
        try:
            kind = NodeKind(kind_raw)
        except ValueError:
            raise ParseError(
                f"unknown node kind {kind_raw!r} (expected Concept or Entity)",
                str(path),
                line_number,
            ) from None
        nodes.append(GraphNode(node_id, kind, tuple(surface_raw.split())))
    return nodes


def _read_edges(path: Path) -> list[tuple[str, str]]:
    edges: list[tuple[str, str]] = []
    for line_number, line in _content_lines(path):
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 3:
            raise ParseError(
                f"expected 'child<TAB>isA<TAB>parent', got {len(fields)} fields",
                str(path),
                line_number,
            )
        child, relation, parent = fields
        if relation != ISA:
            raise ParseError(
                f"unsupported relation {relation!r}; only {ISA} is allowed",
                str(path),
                line_number,
            )
        edges.append((child, parent))
    return edges


def load_concept_graph(edges_path: str | Path, nodes_path: str | Path | None = None) -> ConceptGraph:
    """Load a concept graph from an edge-list file and an optional node file.

    Without a node file, nodes that appear as a parent are Concepts and the
    rest are Entities; surfaces come from the ids.

    Raises:
        ParseError: If a line is malformed (with its line number)
        ValidationError: If the graph violates an invariant
    """
    edges_path = Path(edges_path)
    edges = _read_edges(edges_path)

    if nodes_path is not None:
        nodes = _read_nodes(Path(nodes_path))
    else:
        parents = {p for _, p in edges}
        ids = sorted({n for edge in edges for n in edge})
        nodes = [
            GraphNode(n, NodeKind.CONCEPT if n in parents else NodeKind.ENTITY, _default_surface(n))
            for n in ids
        ]

    graph = ConceptGraph.from_parts(nodes, edges)
    logger.info(
        "concept_graph_loaded",
        path=str(edges_path),
        nodes=len(graph),
        edges=len(graph.edges),
    )
    return graph


def save_concept_graph(g: ConceptGraph, edges_path: str | Path, nodes_path: str | Path) -> None:
    """Write ``g`` as a sorted edge-list file plus node file."""
    with Path(nodes_path).open("w", encoding="utf-8") as handle:
        for node_id in g.node_ids():
            node = g.node(node_id)
            handle.write(f"{node.id}\t{node.kind.value}\t{node.phrase}\n")
    with Path(edges_path).open("w", encoding="utf-8") as handle:
        for child, relation, parent in g.edges:
            handle.write(f"{child}\t{relation}\t{parent}\n")

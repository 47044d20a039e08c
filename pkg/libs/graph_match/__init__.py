"""
graph_match library - concept graphs, heterogeneous pair graphs and the R-GCN core.

Usage:
    from libs.graph_match import load_concept_graph, build_pair_graph
    from libs.graph_match.rgcn import RgcnLayer, DecompositionMode

    g = load_concept_graph("concepts.edges", "concepts.nodes")
    layer = RgcnLayer(in_dim, 128, num_relations, DecompositionMode.BASIS, num_bases=14)
"""

__version__ = "0.1.0"

from .concept_graph import (
    ConceptGraph,
    GraphNode,
    NodeKind,
    concepts_of,
    context_subgraph,
    entities_of,
    load_concept_graph,
    save_concept_graph,
)
from .exceptions import (
    ArgumentError,
    ConstructionError,
    GraphMatchError,
    NodeNotFoundError,
    NonFiniteLossError,
    NumericError,
    ParseError,
    PartitionError,
    ShapeError,
    StateError,
    ValidationError,
)
from .graph_builder import (
    HeteroGraph,
    HetNodeKind,
    RelationVocab,
    build_pair_graph,
    dump_graph,
    write_graph_dump,
)

__all__ = [
    "ConceptGraph",
    "GraphNode",
    "NodeKind",
    "concepts_of",
    "context_subgraph",
    "entities_of",
    "load_concept_graph",
    "save_concept_graph",
    "ArgumentError",
    "ConstructionError",
    "GraphMatchError",
    "NodeNotFoundError",
    "NonFiniteLossError",
    "NumericError",
    "ParseError",
    "PartitionError",
    "ShapeError",
    "StateError",
    "ValidationError",
    "HeteroGraph",
    "HetNodeKind",
    "RelationVocab",
    "build_pair_graph",
    "dump_graph",
    "write_graph_dump",
]

"""Relational graph convolution layer with analytic gradients.

    h'_v = act( sum_r sum_{w in N^r(v)} W_r h_w / |N^r(v)|  +  W_0 h_v )

An edge ``(src, r, dst)`` sends a message from ``src`` to ``dst`` under
relation ``r``; ``N^r(v)`` counts incoming edges, so a duplicated edge counts
twice in both the sum and the normalizer.

W_r is materialized from the layer's decomposition before message passing:

- FULL:  one free matrix per relation
- BASIS: W_r = sum_b a[r, b] V_b
- BLOCK: W_r = diag(Q[r, 0], ..., Q[r, B-1])

Messages are then computed per relation present in the graph and scattered
with ``np.add.at``; gradients flow back through dW_r into the decomposition.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

import numpy as np

from ..exceptions import ArgumentError, ShapeError, StateError
from .tensor import as_tensor, glorot_uniform, relu


class DecompositionMode(str, Enum):
    FULL = "full"
    BASIS = "basis"
    BLOCK = "block"


class EdgeSource(Protocol):
    """Anything that exposes typed edges (a ``HeteroGraph`` does)."""

    @property
    def num_nodes(self) -> int: ...

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class EdgeIndex:
    """Edge list as parallel arrays plus the per-edge normalizer 1 / |N^r(dst)|."""

    num_nodes: int
    src: np.ndarray
    rel: np.ndarray
    dst: np.ndarray
    norm: np.ndarray

    @classmethod
    def build(cls, num_nodes: int, src: np.ndarray, rel: np.ndarray, dst: np.ndarray) -> EdgeIndex:
        src = np.asarray(src, dtype=np.int64)
        rel = np.asarray(rel, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if not (src.shape == rel.shape == dst.shape) or src.ndim != 1:
            raise ShapeError("src, rel and dst must be 1-d arrays of equal length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= num_nodes):
            raise ShapeError(
                f"Edge endpoint out of range for {num_nodes} nodes", {"num_nodes": num_nodes}
            )
        if src.size:
            keys = dst * (int(rel.max()) + 1) + rel
            _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
            norm = 1.0 / counts[inverse].astype(np.float64)
        else:
            norm = np.zeros(0)
        return cls(num_nodes, src, rel, dst, norm)

    @classmethod
    def from_graph(cls, graph: EdgeSource) -> EdgeIndex:
        src, rel, dst = graph.edge_arrays()
        return cls.build(graph.num_nodes, src, rel, dst)

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    def relations_present(self) -> np.ndarray:
        return np.unique(self.rel)

    def permuted(self, perm: np.ndarray) -> EdgeIndex:
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return EdgeIndex.build(self.num_nodes, perm[self.src], self.rel, perm[self.dst])


def as_edge_index(graph: EdgeIndex | EdgeSource) -> EdgeIndex:
    return graph if isinstance(graph, EdgeIndex) else EdgeIndex.from_graph(graph)


@dataclass
class ForwardCache:
    edges: EdgeIndex
    h: np.ndarray
    weights: dict[int, np.ndarray]
    pre: np.ndarray


class RgcnLayer:
    """One R-GCN layer.

    Parameters live in ``self.params`` (name -> float64 array) and are updated
    in place by the optimizer:

    - ``self_weight``: W_0, shape (out, in)
    - FULL:  ``weights`` (R, out, in)
    - BASIS: ``bases`` (B, out, in), ``coefficients`` (R, B)
    - BLOCK: ``blocks`` (R, B, out/B, in/B)
    """

    def __init__(
        self,
        in_dim: int,
        out_dim: int,
        num_relations: int,
        mode: DecompositionMode = DecompositionMode.BASIS,
        num_bases: int = 1,
        activation: bool = True,
        rng: np.random.Generator | None = None,
    ):
        if min(in_dim, out_dim, num_relations, num_bases) < 1:
            raise ArgumentError(
                "in_dim, out_dim, num_relations and num_bases must be >= 1",
                {"in_dim": in_dim, "out_dim": out_dim, "relations": num_relations, "bases": num_bases},
            )
        if mode is DecompositionMode.BLOCK and (in_dim % num_bases or out_dim % num_bases):
            raise ShapeError(
                f"Block decomposition needs B={num_bases} to divide in_dim={in_dim} and out_dim={out_dim}",
                {"in_dim": in_dim, "out_dim": out_dim, "bases": num_bases},
            )
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.num_relations = num_relations
        self.mode = mode
        self.num_bases = num_bases
        self.activation = activation
        self._cache: ForwardCache | None = None

        rng = rng if rng is not None else np.random.default_rng(0)
        shapes = self.param_shapes()
        self.params: dict[str, np.ndarray] = {}
        for name, shape in shapes.items():
            if name == "coefficients":
                bound = 1.0 / np.sqrt(num_bases)
                self.params[name] = rng.uniform(-bound, bound, size=shape)
            else:
                self.params[name] = glorot_uniform(rng, shape, in_dim, out_dim)

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        shapes: dict[str, tuple[int, ...]] = {}
        r, b, o, i = self.num_relations, self.num_bases, self.out_dim, self.in_dim
        if self.mode is DecompositionMode.FULL:
            shapes["weights"] = (r, o, i)
        elif self.mode is DecompositionMode.BASIS:
            shapes["bases"] = (b, o, i)
            shapes["coefficients"] = (r, b)
        else:
            shapes["blocks"] = (r, b, o // b, i // b)
        shapes["self_weight"] = (o, i)
        return shapes

    def num_parameters(self) -> int:
        return int(sum(np.prod(shape) for shape in self.param_shapes().values()))

    def set_params(self, params: dict[str, np.ndarray]) -> None:
        """Replace parameters after checking names and shapes."""
        shapes = self.param_shapes()
        if set(params) != set(shapes):
            raise ShapeError(
                f"Expected parameters {sorted(shapes)}, got {sorted(params)}",
                {"expected": sorted(shapes), "got": sorted(params)},
            )
        for name, shape in shapes.items():
            self.params[name] = as_tensor(params[name], shape, name).copy()
        self._cache = None

    # -- weights -----------------------------------------------------------

    def relation_weight(self, relation: int) -> np.ndarray:
        if not 0 <= relation < self.num_relations:
            raise ArgumentError(
                f"Relation {relation} out of range [0, {self.num_relations})", {"relation": relation}
            )
        if self.mode is DecompositionMode.FULL:
            return self.params["weights"][relation].copy()
        if self.mode is DecompositionMode.BASIS:
            return np.tensordot(self.params["coefficients"][relation], self.params["bases"], axes=1)
        blocks = self.params["blocks"][relation]
        weight = np.zeros((self.out_dim, self.in_dim))
        bo, bi = blocks.shape[1], blocks.shape[2]
        for b in range(self.num_bases):
            weight[b * bo : (b + 1) * bo, b * bi : (b + 1) * bi] = blocks[b]
        return weight

    # -- forward / backward ------------------------------------------------

    def forward(self, graph: EdgeIndex | EdgeSource, h: np.ndarray) -> np.ndarray:
        edges = as_edge_index(graph)
        h = as_tensor(h, (edges.num_nodes, self.in_dim), "h")
        if edges.num_edges and int(edges.rel.max()) >= self.num_relations:
            raise ShapeError(
                f"Edge relation {int(edges.rel.max())} exceeds layer relation count {self.num_relations}"
            )

        pre = h @ self.params["self_weight"].T
        weights: dict[int, np.ndarray] = {}
        for relation in edges.relations_present():
            r = int(relation)
            weights[r] = self.relation_weight(r)
            mask = edges.rel == r
            messages = (h[edges.src[mask]] @ weights[r].T) * edges.norm[mask, None]
            np.add.at(pre, edges.dst[mask], messages)

        self._cache = ForwardCache(edges, h, weights, pre)
        return relu(pre) if self.activation else pre.copy()

    def backward(self, upstream: np.ndarray) -> tuple[dict[str, np.ndarray], np.ndarray]:
        """Gradients of the cached forward pass.

        Returns:
            (parameter gradients keyed like ``params``, gradient w.r.t. h)

        Raises:
            StateError: If no forward pass is cached
        """
        cache = self._cache
        if cache is None:
            raise StateError("backward() called without a cached forward pass")
        upstream = as_tensor(upstream, (cache.edges.num_nodes, self.out_dim), "upstream")
        d_pre = upstream * (cache.pre > 0) if self.activation else upstream

        grads = {name: np.zeros(shape) for name, shape in self.param_shapes().items()}
        grads["self_weight"] = d_pre.T @ cache.h
        d_h = d_pre @ self.params["self_weight"]

        edges = cache.edges
        d_weights: dict[int, np.ndarray] = {}
        for r, weight in cache.weights.items():
            mask = edges.rel == r
            d_messages = d_pre[edges.dst[mask]] * edges.norm[mask, None]
            d_weights[r] = d_messages.T @ cache.h[edges.src[mask]]
            np.add.at(d_h, edges.src[mask], d_messages @ weight)

        for r, d_weight in d_weights.items():
            if self.mode is DecompositionMode.FULL:
                grads["weights"][r] += d_weight
            elif self.mode is DecompositionMode.BASIS:
                grads["bases"] += np.multiply.outer(self.params["coefficients"][r], d_weight)
                grads["coefficients"][r] += np.tensordot(self.params["bases"], d_weight, axes=([1, 2], [0, 1]))
            else:
                bo, bi = self.out_dim // self.num_bases, self.in_dim // self.num_bases
                for b in range(self.num_bases):
                    grads["blocks"][r, b] += d_weight[b * bo : (b + 1) * bo, b * bi : (b + 1) * bi]
        return grads, d_h

    @property
    def cached_pre_activation(self) -> np.ndarray | None:
        return None if self._cache is None else self._cache.pre


def rgcn_forward(layer: RgcnLayer, graph: EdgeIndex | EdgeSource, h: np.ndarray) -> np.ndarray:
    """Apply ``layer`` to node states ``h`` (|V| x in_dim) -> |V| x out_dim."""
    return layer.forward(graph, h)


def reconstruct_weight(layer: RgcnLayer, relation: int) -> np.ndarray:
    """Materialized W_r (out x in) under the layer's decomposition."""
    return layer.relation_weight(relation)


def backward(
    layer: RgcnLayer, graph: EdgeIndex | EdgeSource, h: np.ndarray, upstream: np.ndarray
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Gradients for {weights | bases, coefficients | blocks, self_weight} and h.

    ``graph`` and ``h`` must be the inputs of the layer's cached forward pass.

    Raises:
        StateError: If the layer has no cached forward pass for these inputs
    """
    cache = layer._cache
    if cache is None:
        raise StateError("backward() called without a cached forward pass")
    edges = as_edge_index(graph)
    if edges.num_nodes != cache.edges.num_nodes or not np.array_equal(np.asarray(h), cache.h):
        raise StateError("backward() inputs do not match the cached forward pass")
    return layer.backward(upstream)


def count_parameters(layers: RgcnLayer | Iterable[RgcnLayer]) -> int:
    """Closed-form trainable parameter count of one layer or a stack."""
    if isinstance(layers, RgcnLayer):
        return layers.num_parameters()
    return sum(layer.num_parameters() for layer in layers)

"""Brute-force message passing used to check ``RgcnLayer.forward``.

Written as the generic message/update scheme: every edge produces a message
M(h_v, h_w, e_vw) = W_r h_w / c_vw that is summed into m_v, then the update
U(h_v, m_v) = act(m_v + W_0 h_v) is applied per node. Plain Python loops, no
vectorization.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .layer import EdgeIndex, EdgeSource, RgcnLayer, as_edge_index
from .tensor import as_tensor


def message_passing_oracle(layer: RgcnLayer, graph: EdgeIndex | EdgeSource, h: np.ndarray) -> np.ndarray:
    edges = as_edge_index(graph)
    h = as_tensor(h, (edges.num_nodes, layer.in_dim), "h")

    in_degree: Counter[tuple[int, int]] = Counter()
    for e in range(edges.num_edges):
        in_degree[(int(edges.dst[e]), int(edges.rel[e]))] += 1

    messages = [np.zeros(layer.out_dim) for _ in range(edges.num_nodes)]
    for e in range(edges.num_edges):
        w, r, v = int(edges.src[e]), int(edges.rel[e]), int(edges.dst[e])
        weight = layer.relation_weight(r)
        message = np.zeros(layer.out_dim)
        for i in range(layer.out_dim):
            for j in range(layer.in_dim):
                message[i] += weight[i, j] * h[w, j]
        messages[v] += message / in_degree[(v, r)]

    out = np.zeros((edges.num_nodes, layer.out_dim))
    self_weight = layer.params["self_weight"]
    for v in range(edges.num_nodes):
        for i in range(layer.out_dim):
            total = messages[v][i]
            for j in range(layer.in_dim):
                total += self_weight[i, j] * h[v, j]
            out[v, i] = max(total, 0.0) if layer.activation else total
    return out

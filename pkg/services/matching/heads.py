"""Interaction features and the MLP classifier shared by every matcher."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from libs.graph_match.exceptions import ShapeError
from libs.graph_match.rgcn.tensor import glorot_uniform, relu


def interaction_features(v_s: np.ndarray, v_t: np.ndarray) -> np.ndarray:
    """``[|V_S - V_T|, V_S * V_T]`` of length 2d, with -0.0 normalized to 0.0."""
    v_s = np.asarray(v_s, dtype=np.float64)
    v_t = np.asarray(v_t, dtype=np.float64)
    if v_s.shape != v_t.shape or v_s.ndim != 1:
        raise ShapeError(
            f"Interaction inputs must be equal-length vectors, got {v_s.shape} and {v_t.shape}",
            {"v_s": list(v_s.shape), "v_t": list(v_t.shape)},
        )
    return np.concatenate([np.abs(v_s - v_t), v_s * v_t]) + 0.0


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    exp = np.exp(shifted)
    return exp / exp.sum()


def cross_entropy(logits: np.ndarray, label: int) -> float:
    """-log softmax(logits)[label], computed stably."""
    shifted = logits - np.max(logits)
    return float(np.log(np.exp(shifted).sum()) - shifted[label])


@dataclass
class _HeadCache:
    v_s: np.ndarray
    v_t: np.ndarray
    features: np.ndarray
    hidden_pre: np.ndarray
    hidden: np.ndarray
    logits: np.ndarray


class InteractionHead:
    """MLP ``2d -> 2d (ReLU) -> 2`` over interaction features.

    Parameters: ``w1`` (2d, 2d), ``b1`` (2d), ``w2`` (2, 2d), ``b2`` (2).
    """

    def __init__(self, dim: int, rng: np.random.Generator | None = None):
        if dim < 1:
            raise ShapeError(f"Head dimension must be >= 1, got {dim}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.dim = dim
        width = 2 * dim
        self.params: dict[str, np.ndarray] = {
            "w1": glorot_uniform(rng, (width, width), width, width),
            "b1": np.zeros(width),
            "w2": glorot_uniform(rng, (2, width), width, 2),
            "b2": np.zeros(2),
        }
        self._cache: _HeadCache | None = None

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        width = 2 * self.dim
        return {"w1": (width, width), "b1": (width,), "w2": (2, width), "b2": (2,)}

    def num_parameters(self) -> int:
        return int(sum(np.prod(shape) for shape in self.param_shapes().values()))

    def logits(self, v_s: np.ndarray, v_t: np.ndarray) -> np.ndarray:
        features = interaction_features(v_s, v_t)
        if features.size != 2 * self.dim:
            raise ShapeError(
                f"Head expects {2 * self.dim} features, got {features.size}",
                {"expected": 2 * self.dim, "got": int(features.size)},
            )
        hidden_pre = self.params["w1"] @ features + self.params["b1"]
        hidden = relu(hidden_pre)
        logits = self.params["w2"] @ hidden + self.params["b2"]
        self._cache = _HeadCache(np.asarray(v_s), np.asarray(v_t), features, hidden_pre, hidden, logits)
        return logits

    def probability(self, v_s: np.ndarray, v_t: np.ndarray) -> float:
        """Softmax probability of label 1."""
        return float(softmax(self.logits(v_s, v_t))[1])

    def loss_and_gradients(
        self, v_s: np.ndarray, v_t: np.ndarray, label: int
    ) -> tuple[float, dict[str, np.ndarray], np.ndarray, np.ndarray]:
        """Cross-entropy loss, head gradients, and gradients w.r.t. V_S and V_T."""
        logits = self.logits(v_s, v_t)
        cache = self._cache
        assert cache is not None
        loss = cross_entropy(logits, label)

        d_logits = softmax(logits)
        d_logits[label] -= 1.0
        grads = {
            "w2": np.outer(d_logits, cache.hidden),
            "b2": d_logits,
        }
        d_hidden = self.params["w2"].T @ d_logits
        d_hidden_pre = d_hidden * (cache.hidden_pre > 0)
        grads["w1"] = np.outer(d_hidden_pre, cache.features)
        grads["b1"] = d_hidden_pre
        d_features = self.params["w1"].T @ d_hidden_pre

        d_abs, d_prod = d_features[: self.dim], d_features[self.dim :]
        sign = np.sign(cache.v_s - cache.v_t)
        d_v_s = d_abs * sign + d_prod * cache.v_t
        d_v_t = -d_abs * sign + d_prod * cache.v_s
        return loss, grads, d_v_s, d_v_t

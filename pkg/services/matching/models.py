"""Graph-Graph, Graph-Seq and Seq-Seq matchers.

Every model maps an input to a pair of vectors (V_S, V_T) and classifies them
with an ``InteractionHead``. Parameters are exposed as one flat dict of
float64 arrays (``encoder.<layer>.<name>`` and ``head.<name>``) that the
optimizer updates in place and the checkpoint codec persists.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from libs.graph_match.concept_graph import ConceptGraph
from libs.graph_match.exceptions import ConstructionError, ShapeError, ValidationError
from libs.graph_match.graph_builder import HeteroGraph
from libs.graph_match.parsers import DependencyParse, EmbeddingTable
from libs.graph_match.rgcn import DecompositionMode, EdgeIndex, RgcnLayer, as_tensor
from libs.graph_match.storage import load_checkpoint, save_checkpoint

from .featurize import (
    ContextInput,
    GraphPairInput,
    ModelInput,
    ModelKind,
    SequencePairInput,
    context_input,
    graph_pair_input,
    sequence_input,
)
from .heads import InteractionHead, softmax

logger = structlog.get_logger(__name__)


class ModelConfig(BaseModel):
    """Architecture of a matcher.

    ``in_dim`` is the node feature width (Graph-Graph) or the embedding
    dimension (Graph-Seq, Seq-Seq).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ModelKind = ModelKind.GRAPH_GRAPH
    in_dim: int = Field(..., ge=1)
    num_relations: int = Field(2, ge=1)
    hidden_dim: int = Field(128, ge=1)
    num_layers: int = Field(3, ge=1)
    num_bases: int = Field(14, ge=1)
    decomposition: DecompositionMode = DecompositionMode.BASIS
    final_activation: bool = True
    seed: int = 0

    @model_validator(mode="after")
    def _check_block_dims(self) -> ModelConfig:
        if self.kind is not ModelKind.SEQ_SEQ and self.decomposition is DecompositionMode.BLOCK:
            dims = self.layer_dims()
            bad = [d for d in dims if d % self.num_bases]
            if bad:
                raise ValueError(
                    f"block decomposition needs num_bases={self.num_bases} to divide every layer width {dims}"
                )
        return self

    def layer_dims(self) -> list[int]:
        """Widths from input to output of the R-GCN stack (empty for Seq-Seq).

        Graph-Seq ends at ``in_dim`` so V_T is comparable with the mean
        sentence vector.
        """
        if self.kind is ModelKind.SEQ_SEQ:
            return []
        dims = [self.in_dim] + [self.hidden_dim] * self.num_layers
        if self.kind is ModelKind.GRAPH_SEQ:
            dims[-1] = self.in_dim
        return dims

    @property
    def head_dim(self) -> int:
        dims = self.layer_dims()
        return dims[-1] if dims else self.in_dim


def parameter_count(config: ModelConfig) -> int:
    """Trainable parameters implied by ``config``, without building the model."""
    total = 0
    dims = config.layer_dims()
    r, b = config.num_relations, config.num_bases
    for i, o in zip(dims, dims[1:], strict=False):
        if config.decomposition is DecompositionMode.FULL:
            total += r * o * i
        elif config.decomposition is DecompositionMode.BASIS:
            total += b * o * i + r * b
        else:
            total += r * b * (o // b) * (i // b)
        total += o * i
    width = 2 * config.head_dim
    return total + width * width + width + 2 * width + 2


class RgcnEncoder:
    """Stack of R-GCN layers with backprop through all of them."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        dims = config.layer_dims()
        self.layers = [
            RgcnLayer(
                i,
                o,
                config.num_relations,
                mode=config.decomposition,
                num_bases=config.num_bases,
                activation=config.final_activation or k < len(dims) - 2,
                rng=rng,
            )
            for k, (i, o) in enumerate(zip(dims, dims[1:], strict=False))
        ]

    def forward(self, edges: EdgeIndex, features: np.ndarray) -> np.ndarray:
        h = features
        for layer in self.layers:
            h = layer.forward(edges, h)
        return h

    def backward(self, upstream: np.ndarray) -> list[dict[str, np.ndarray]]:
        grads: list[dict[str, np.ndarray]] = []
        d_h = upstream
        for layer in reversed(self.layers):
            layer_grads, d_h = layer.backward(d_h)
            grads.append(layer_grads)
        return grads[::-1]


class MatchModel(ABC):
    """Common interface of the three matchers."""

    kind: ModelKind

    def __init__(self, config: ModelConfig):
        if config.kind is not self.kind:
            raise ValidationError(
                f"{type(self).__name__} cannot be built from a {config.kind.value} config"
            )
        self.config = config
        rng = np.random.default_rng(config.seed)
        self.encoder = RgcnEncoder(config, rng) if config.layer_dims() else None
        self.head = InteractionHead(config.head_dim, rng)

    def parameters(self) -> dict[str, np.ndarray]:
        """Live references to every trainable tensor, keyed by stable names."""
        params: dict[str, np.ndarray] = {}
        if self.encoder is not None:
            for k, layer in enumerate(self.encoder.layers):
                for name, value in layer.params.items():
                    params[f"encoder.{k}.{name}"] = value
        for name, value in self.head.params.items():
            params[f"head.{name}"] = value
        return params

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters().values()))

    def load_parameters(self, tensors: Mapping[str, np.ndarray]) -> None:
        """Copy ``tensors`` into the model in place.

        Raises:
            ValidationError: If names or shapes disagree with the architecture
        """
        own = self.parameters()
        if set(tensors) != set(own):
            missing, extra = sorted(set(own) - set(tensors)), sorted(set(tensors) - set(own))
            raise ValidationError(
                "Parameter names do not match the model architecture",
                {"missing": missing, "unexpected": extra},
            )
        for name, target in own.items():
            value = np.asarray(tensors[name], dtype=np.float64)
            if value.shape != target.shape:
                raise ValidationError(
                    f"Parameter {name} has shape {value.shape}, model expects {target.shape}",
                    {"name": name, "shape": list(value.shape), "expected": list(target.shape)},
                )
            target[...] = value

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self.parameters().items()}

    @abstractmethod
    def encode(self, inp: ModelInput) -> tuple[np.ndarray, np.ndarray]:
        """(V_S, V_T) for one input; caches what ``backward_encode`` needs."""

    @abstractmethod
    def backward_encode(self, d_v_s: np.ndarray, d_v_t: np.ndarray) -> dict[str, np.ndarray]:
        """Encoder gradients for the most recent ``encode``."""

    def logits(self, inp: ModelInput) -> np.ndarray:
        v_s, v_t = self.encode(inp)
        return self.head.logits(v_s, v_t)

    def predict_proba(self, inp: ModelInput) -> float:
        """Probability of label 1."""
        return float(softmax(self.logits(inp))[1])

    def loss_and_gradients(self, inp: ModelInput, label: int) -> tuple[float, dict[str, np.ndarray]]:
        v_s, v_t = self.encode(inp)
        loss, head_grads, d_v_s, d_v_t = self.head.loss_and_gradients(v_s, v_t, label)
        grads = self.backward_encode(d_v_s, d_v_t)
        for name, grad in head_grads.items():
            grads[f"head.{name}"] = grad
        return loss, grads

    def _encoder_grads(self, upstream: np.ndarray) -> dict[str, np.ndarray]:
        assert self.encoder is not None
        grads: dict[str, np.ndarray] = {}
        for k, layer_grads in enumerate(self.encoder.backward(upstream)):
            for name, grad in layer_grads.items():
                grads[f"encoder.{k}.{name}"] = grad
        return grads


class GraphGraphModel(MatchModel):
    """R-GCN over the pair graph; V_S and V_T are the two virtual-node rows."""

    kind = ModelKind.GRAPH_GRAPH

    def encode(self, inp: ModelInput) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(inp, GraphPairInput):
            raise ShapeError(f"Graph-Graph model needs a GraphPairInput, got {type(inp).__name__}")
        n = inp.edges.num_nodes
        if not (0 <= inp.sentence_node < n and 0 <= inp.target_node < n):
            raise ConstructionError(
                "Virtual node index outside the pair graph",
                {"sentence_node": inp.sentence_node, "target_node": inp.target_node, "nodes": n},
            )
        assert self.encoder is not None
        h = self.encoder.forward(inp.edges, as_tensor(inp.features, (n, self.config.in_dim), "features"))
        self._rows = (n, inp.sentence_node, inp.target_node)
        return h[inp.sentence_node].copy(), h[inp.target_node].copy()

    def backward_encode(self, d_v_s: np.ndarray, d_v_t: np.ndarray) -> dict[str, np.ndarray]:
        n, sentence_node, target_node = self._rows
        upstream = np.zeros((n, self.config.head_dim))
        upstream[sentence_node] += d_v_s
        upstream[target_node] += d_v_t
        return self._encoder_grads(upstream)


class GraphSeqModel(MatchModel):
    """R-GCN over the concept context for V_T; V_S is the mean sentence vector."""

    kind = ModelKind.GRAPH_SEQ

    def encode(self, inp: ModelInput) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(inp, ContextInput):
            raise ShapeError(f"Graph-Seq model needs a ContextInput, got {type(inp).__name__}")
        n = inp.edges.num_nodes
        assert self.encoder is not None
        h = self.encoder.forward(inp.edges, as_tensor(inp.features, (n, self.config.in_dim), "features"))
        self._rows = (n, inp.target_node)
        v_s = as_tensor(inp.sentence_vector, (self.config.head_dim,), "sentence_vector")
        return v_s, h[inp.target_node].copy()

    def backward_encode(self, d_v_s: np.ndarray, d_v_t: np.ndarray) -> dict[str, np.ndarray]:
        n, target_node = self._rows
        upstream = np.zeros((n, self.config.head_dim))
        upstream[target_node] += d_v_t
        return self._encoder_grads(upstream)


class SeqSeqModel(MatchModel):
    """Mean word vectors on both sides; only the head is trained."""

    kind = ModelKind.SEQ_SEQ

    def encode(self, inp: ModelInput) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(inp, SequencePairInput):
            raise ShapeError(f"Seq-Seq model needs a SequencePairInput, got {type(inp).__name__}")
        return inp.sentence_vector, inp.concept_vector

    def backward_encode(self, d_v_s: np.ndarray, d_v_t: np.ndarray) -> dict[str, np.ndarray]:
        return {}


_MODELS: dict[ModelKind, type[MatchModel]] = {
    ModelKind.GRAPH_GRAPH: GraphGraphModel,
    ModelKind.GRAPH_SEQ: GraphSeqModel,
    ModelKind.SEQ_SEQ: SeqSeqModel,
}


def build_model(config: ModelConfig) -> MatchModel:
    model = _MODELS[config.kind](config)
    logger.info(
        "model_built",
        kind=config.kind.value,
        parameters=model.num_parameters(),
        layers=len(config.layer_dims()) - 1 if config.layer_dims() else 0,
    )
    return model


# -- prediction entry points -------------------------------------------------


def predict_graph_graph(model: MatchModel, pair_graph: HeteroGraph) -> float:
    """Raises ConstructionError when the graph has no virtual nodes."""
    return model.predict_proba(graph_pair_input(pair_graph))


def predict_graph_seq(
    model: MatchModel, ctx: ConceptGraph, target: str, sentence: DependencyParse, table: EmbeddingTable
) -> float:
    return model.predict_proba(context_input(ctx, target, sentence, table))


def predict_seq_seq(
    concept: list[str], sentence: list[str], table: EmbeddingTable, head: InteractionHead
) -> float:
    """Raises ArgumentError when either side is empty."""
    inp = sequence_input(concept, sentence, table)
    return head.probability(inp.sentence_vector, inp.concept_vector)


# -- checkpoints --------------------------------------------------------------


def save_model(path: str | Path, model: MatchModel, extra: Mapping[str, Any] | None = None) -> None:
    """Write ``model`` with its config (and ``extra`` manifest entries) to ``path``."""
    manifest: dict[str, Any] = {"model": model.config.model_dump(mode="json")}
    manifest.update(extra or {})
    save_checkpoint(path, manifest, model.parameters())


def load_model(path: str | Path) -> tuple[MatchModel, dict[str, Any]]:
    """Rebuild a model from a checkpoint; returns it with the full manifest.

    Raises:
        ValidationError: If the stored tensors do not fit the stored config
    """
    checkpoint = load_checkpoint(path)
    try:
        config = ModelConfig.model_validate(checkpoint.require("model"))
    except ValueError as e:
        raise ValidationError(f"Invalid model config in checkpoint: {e}", {"path": str(path)}) from e
    model = _MODELS[config.kind](config)
    model.load_parameters(checkpoint.tensors)
    return model, checkpoint.manifest

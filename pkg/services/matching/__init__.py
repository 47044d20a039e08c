"""Concept-sentence matchers built on the R-GCN core."""

from .featurize import (
    ContextInput,
    GraphPairInput,
    ModelInput,
    ModelKind,
    PairFeaturizer,
    SequencePairInput,
    context_input,
    graph_pair_input,
    sequence_input,
)
from .heads import InteractionHead, cross_entropy, interaction_features, softmax
from .models import (
    GraphGraphModel,
    GraphSeqModel,
    MatchModel,
    ModelConfig,
    SeqSeqModel,
    build_model,
    load_model,
    parameter_count,
    predict_graph_graph,
    predict_graph_seq,
    predict_seq_seq,
    save_model,
)

__all__ = [
    "ContextInput",
    "GraphGraphModel",
    "GraphPairInput",
    "GraphSeqModel",
    "InteractionHead",
    "MatchModel",
    "ModelConfig",
    "ModelInput",
    "ModelKind",
    "PairFeaturizer",
    "SeqSeqModel",
    "SequencePairInput",
    "build_model",
    "context_input",
    "cross_entropy",
    "graph_pair_input",
    "interaction_features",
    "load_model",
    "parameter_count",
    "predict_graph_graph",
    "predict_graph_seq",
    "predict_seq_seq",
    "save_model",
    "sequence_input",
    "softmax",
]

"""Numeric core: relational graph convolution over typed edge lists."""

from .gradcheck import gradient_check, numerical_gradient, relative_error
from .layer import (
    DecompositionMode,
    EdgeIndex,
    RgcnLayer,
    backward,
    count_parameters,
    reconstruct_weight,
    rgcn_forward,
)
from .oracle import message_passing_oracle
from .tensor import as_tensor, glorot_uniform, relu

__all__ = [
    "DecompositionMode",
    "EdgeIndex",
    "RgcnLayer",
    "as_tensor",
    "backward",
    "count_parameters",
    "glorot_uniform",
    "gradient_check",
    "message_passing_oracle",
    "numerical_gradient",
    "reconstruct_weight",
    "relative_error",
    "relu",
    "rgcn_forward",
]

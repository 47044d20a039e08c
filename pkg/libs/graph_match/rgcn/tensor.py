"""Dense float64 tensors and parameter initializers."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..exceptions import NumericError, ShapeError


def as_tensor(values: object, shape: Sequence[int | None] | None = None, name: str = "tensor") -> np.ndarray:
    """Return ``values`` as a float64 array, checking shape and finiteness.

    ``None`` entries in ``shape`` match any size.

    Raises:
        ShapeError: If the array does not have the expected shape
        NumericError: If the array contains NaN or Inf
    """
    array = np.asarray(values, dtype=np.float64)
    if shape is not None:
        if array.ndim != len(shape) or any(
            want is not None and got != want for got, want in zip(array.shape, shape, strict=True)
        ):
            raise ShapeError(
                f"{name} has shape {array.shape}, expected {tuple(shape)}",
                {"name": name, "shape": list(array.shape), "expected": list(shape)},
            )
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{name} contains non-finite values", {"name": name})
    return array


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform in [-sqrt(6 / (fan_in + fan_out)), +sqrt(6 / (fan_in + fan_out))]."""
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)

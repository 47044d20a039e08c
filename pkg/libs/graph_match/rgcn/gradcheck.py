"""Central finite-difference gradient checking."""

from __future__ import annotations

from collections.abc import Callable, Mapping

import numpy as np

TINY = 1e-12


def numerical_gradient(fn: Callable[[], float], param: np.ndarray, eps: float = 1e-4) -> np.ndarray:
    """d fn / d param by central differences; ``param`` is perturbed in place and restored."""
    grad = np.zeros_like(param)
    it = np.nditer(param, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        original = param[idx]
        param[idx] = original + eps
        plus = fn()
        param[idx] = original - eps
        minus = fn()
        param[idx] = original
        grad[idx] = (plus - minus) / (2.0 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max|a - n| / max(max|a|, max|n|); 0 when both are zero."""
    scale = max(float(np.max(np.abs(analytic), initial=0.0)), float(np.max(np.abs(numeric), initial=0.0)))
    diff = float(np.max(np.abs(analytic - numeric), initial=0.0))
    return diff / max(scale, TINY) if diff else 0.0


def gradient_check(
    fn: Callable[[], float],
    params: Mapping[str, np.ndarray],
    analytic: Mapping[str, np.ndarray],
    eps: float = 1e-4,
) -> dict[str, float]:
    """Relative error between ``analytic`` and finite-difference gradients, per tensor.

    Args:
        fn: Scalar loss evaluated at the current contents of ``params``
        params: Tensors to perturb (mutated in place and restored)
        analytic: Gradients to compare, keyed like ``params``
        eps: Finite-difference step
    """
    return {
        name: relative_error(analytic[name], numerical_gradient(fn, param, eps))
        for name, param in params.items()
    }

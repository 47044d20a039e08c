"""Adam with bias correction, updating parameters in place."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np


class Adam:
    def __init__(
        self,
        params: Mapping[str, np.ndarray],
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = dict(params)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = {name: np.zeros_like(p) for name, p in self.params.items()}
        self._v = {name: np.zeros_like(p) for name, p in self.params.items()}

    def step(self, grads: Mapping[str, np.ndarray], lr: float) -> None:
        """Apply one update. Tensors without a gradient get a zero gradient."""
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name in sorted(self.params):
            param = self.params[name]
            grad = grads.get(name)
            if grad is None:
                grad = np.zeros_like(param)
            m, v = self._m[name], self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            param -= lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)

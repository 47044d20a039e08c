"""Training options and the warmup + cosine learning-rate schedule."""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

from libs.graph_match.exceptions import ArgumentError


class TrainConfig(BaseModel):
    """Optimization settings of one training run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(20, ge=1)
    base_lr: float = Field(1e-4, gt=0)
    warmup_fraction: float = Field(0.10, ge=0, lt=1)
    batch_size: int = Field(8, ge=1)
    seed: int = 0
    threshold: float = Field(0.5, gt=0, lt=1)


def warmup_steps(cfg: TrainConfig, total_steps: int) -> int:
    """ceil(warmup_fraction * total), leaving at least one decay step."""
    return min(math.ceil(cfg.warmup_fraction * total_steps), max(total_steps - 1, 0))


def lr_at(cfg: TrainConfig, step: int, total_steps: int) -> float:
    """Linear warmup from 0 to ``base_lr``, then cosine decay towards 0.

    Raises:
        ArgumentError: If ``step`` is outside [0, total_steps)
    """
    if not 0 <= step < total_steps:
        raise ArgumentError(
            f"step {step} outside [0, {total_steps})", {"step": step, "total_steps": total_steps}
        )
    w = warmup_steps(cfg, total_steps)
    if step < w:
        return cfg.base_lr * step / w
    return cfg.base_lr * 0.5 * (1.0 + math.cos(math.pi * (step - w) / (total_steps - w)))

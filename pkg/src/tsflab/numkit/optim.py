"""AdamW, cosine schedule and global-norm clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .tensor import Tensor


class NumericError(FloatingPointError):
    """Non-finite values reached an optimizer or loss."""


@dataclass
class OptimizerConfig:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.95
    eps: float = 1e-6
    weight_decay: float = 0.01
    clip_norm: float | None = None
    total_steps: int = 2000
    schedule: str = "cosine"

    def __post_init__(self):
        if not 0 < self.beta1 < 1 or not 0 < self.beta2 < 1:
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.eps <= 0 or self.lr <= 0:
            raise ValueError("lr and eps must be positive")
        if self.schedule not in ("cosine", "constant"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ValueError("clip_norm must be positive")


@dataclass
class AdamState:
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def cosine_lr(step: int, total_steps: int, base_lr: float) -> float:
    if step < 0 or step > total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    if total_steps == 0:
        return base_lr
    return base_lr * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))


def adamw_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    cfg: OptimizerConfig,
    step: int,
    lr: float | None = None,
) -> tuple[list[np.ndarray], AdamState]:
    """One decoupled-weight-decay Adam update (returns new arrays)."""
    if step < 1:
        raise ValueError("step counts from 1")
    if len(params) != len(grads):
        raise ValueError("params and grads differ in length")
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    lr = cfg.lr if lr is None else lr
    bc1 = 1.0 - cfg.beta1**step
    bc2 = 1.0 - cfg.beta2**step
    new_params = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape or state.m[i].shape != p.shape:
            raise ValueError(f"shape mismatch at parameter {i}: {p.shape} vs {g.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient at parameter {i}")
        m = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g
        state.m[i], state.v[i] = m, v
        update = (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
        new_params.append(p * (1.0 - lr * cfg.weight_decay) - lr * update)
    return new_params, state


def clip_gradients(grads: Sequence[np.ndarray], max_norm: float) -> list[np.ndarray]:
    if max_norm <= 0:
        raise ValueError("max_norm must be positive")
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if not math.isfinite(norm):
        raise NumericError("gradient norm is not finite")
    if norm > max_norm:
        scale = max_norm / norm
        return [g * scale for g in grads]
    return [np.array(g, copy=True) for g in grads]


class AdamW:
    """Stateful wrapper driving ``adamw_step`` over a fixed parameter list."""

    def __init__(self, params: Sequence[Tensor], cfg: OptimizerConfig):
        self.params = list(params)
        self.cfg = cfg
        self.state = AdamState()
        self.step_count = 0

    def current_lr(self) -> float:
        if self.cfg.schedule == "constant":
            return self.cfg.lr
        return cosine_lr(min(self.step_count, self.cfg.total_steps), self.cfg.total_steps, self.cfg.lr)

    def step(self) -> float:
        """Apply one update; returns the pre-clip gradient norm."""
        grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
        if not math.isfinite(norm):
            raise NumericError("gradient norm is not finite")
        if self.cfg.clip_norm is not None:
            grads = clip_gradients(grads, self.cfg.clip_norm)
        lr = self.current_lr()
        self.step_count += 1
        new, self.state = adamw_step([p.data for p in self.params], grads, self.state, self.cfg, self.step_count, lr=lr)
        for p, arr in zip(self.params, new):
            p.data = arr
        return norm

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

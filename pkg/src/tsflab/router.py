"""Token-level pass/skip routing with Gumbel-Softmax and a straight-through estimator.

Index 0 of every logit pair is the pass path (through the backbone), index 1
is the skip path (straight to the decoder).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkit import Linear, Module, Tensor, ops

PASS, SKIP = 0, 1
U_EPS = 1e-12


@dataclass
class RoutingConfig:
    tau_init: float = 1.0
    tau_final: float = 0.1
    entropy_weight: float = 1e-3
    target_ratio: float = 0.5
    ratio_weight: float = 1e-2
    router_lr: float = 3e-4
    clip_norm: float = 1.0
    weight_decay: float = 0.01
    hidden: int = 32
    # +1 rewards high entropy (exploration); -1 rewards confident decisions
    entropy_sign: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.tau_final <= self.tau_init:
            raise ValueError("need 0 < tau_final <= tau_init")
        if self.entropy_weight < 0 or self.ratio_weight < 0:
            raise ValueError("penalty weights must be non-negative")
        if self.entropy_sign not in (1.0, -1.0):
            raise ValueError("entropy_sign must be +1 or -1")


@dataclass
class RoutingDecision:
    z: np.ndarray  # (..., 2) logits
    g: np.ndarray  # (..., 2) Gumbel noise
    y_hard: np.ndarray  # (..., 2) one-hot
    y_soft: Tensor  # (..., 2) relaxed probabilities
    y: Tensor  # forward value y_hard, gradient of y_soft
    log_soft: Tensor

    @property
    def path(self) -> np.ndarray:
        """1 where the token passes through the backbone, 0 where it skips."""
        return (self.y_hard[..., PASS] == 1.0).astype(np.int64)


class RouterMLP(Module):
    def __init__(self, M: int, hidden: int, rng: np.random.Generator):
        self.M = M
        self.fc1 = Linear(M, hidden, rng)
        self.fc2 = Linear(hidden, 2, rng)

    def __call__(self, x) -> Tensor:
        x = ops.as_tensor(x)
        if x.shape[-1] != self.M:
            raise ValueError(f"router expects embedding dim {self.M}, got {x.shape[-1]}")
        return self.fc2(ops.gelu(self.fc1(x)))


def route_logits(router: RouterMLP, token_embedding) -> Tensor:
    return router(token_embedding)


def gumbel_noise(shape, rng: np.random.Generator) -> np.ndarray:
    u = np.clip(rng.random(shape), U_EPS, 1.0 - U_EPS)
    return -np.log(-np.log(u))


def gumbel_softmax_sample(z, tau: float, rng: np.random.Generator | None = None, g: np.ndarray | None = None) -> RoutingDecision:
    """Relaxed sample at temperature ``tau``; the emitted ``y`` is exactly one-hot."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    z = ops.as_tensor(z)
    if g is None:
        if rng is None:
            raise ValueError("either rng or g is required")
        g = gumbel_noise(z.shape, rng)
    scaled = (z + g) * (1.0 / tau)
    y_soft = ops.softmax(scaled, axis=-1)
    log_soft = ops.log_softmax(scaled, axis=-1)
    # argmax of z + g; ties go to the pass path
    pert = z.data + g
    hard_idx = np.where(pert[..., PASS] >= pert[..., SKIP], PASS, SKIP)
    y_hard = np.zeros(z.shape)
    np.put_along_axis(y_hard, hard_idx[..., None], 1.0, axis=-1)
    y = ops.straight_through(y_hard, y_soft)
    return RoutingDecision(z=z.data.copy(), g=np.asarray(g), y_hard=y_hard, y_soft=y_soft, y=y, log_soft=log_soft)


def anneal_tau(step: int, total_steps: int, cfg: RoutingConfig | None = None) -> float:
    cfg = cfg or RoutingConfig()
    if total_steps <= 0 or step <= 0:
        return cfg.tau_init
    if step >= total_steps:
        return cfg.tau_final
    return cfg.tau_init * (cfg.tau_final / cfg.tau_init) ** (step / total_steps)


def routing_loss(decision: RoutingDecision, cfg: RoutingConfig | None = None, valid: np.ndarray | None = None) -> Tensor:
    """entropy_weight * mean negative entropy + ratio_weight * (mean pass prob - target)^2."""
    cfg = cfg or RoutingConfig()
    p = decision.y_soft.reshape(-1, 2)
    logp = decision.log_soft.reshape(-1, 2)
    if p.shape[0] == 0:
        raise ValueError("routing loss over an empty batch")
    if valid is not None:
        keep = np.flatnonzero(np.asarray(valid, dtype=bool).reshape(-1))
        if keep.size == 0:
            raise ValueError("routing loss over an empty batch")
        p, logp = p[keep], logp[keep]
    neg_entropy = (p * logp).sum(axis=-1).mean()
    gap = p[:, PASS].mean() - cfg.target_ratio
    return neg_entropy * (cfg.entropy_sign * cfg.entropy_weight) + gap * gap * cfg.ratio_weight


def passing_ratio(paths) -> float:
    paths = np.asarray(paths)
    if paths.size == 0:
        raise ValueError("passing ratio of an empty set")
    return float(np.mean(paths == 1))


def inference_route(z) -> np.ndarray:
    """Noise-free argmax; 1 = pass, ties broken toward pass."""
    z = np.asarray(z.data if isinstance(z, Tensor) else z, dtype=np.float64)
    return (z[..., PASS] >= z[..., SKIP]).astype(np.int64)


def decision_from_paths(paths: np.ndarray) -> np.ndarray:
    """One-hot (pass, skip) pairs from 0/1 pass indicators."""
    paths = np.asarray(paths, dtype=np.int64)
    out = np.zeros(paths.shape + (2,))
    out[..., PASS] = paths
    out[..., SKIP] = 1 - paths
    return out


def entropy_of(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])))


__all__ = [
    "PASS",
    "SKIP",
    "RouterMLP",
    "RoutingConfig",
    "RoutingDecision",
    "anneal_tau",
    "decision_from_paths",
    "entropy_of",
    "gumbel_noise",
    "gumbel_softmax_sample",
    "inference_route",
    "passing_ratio",
    "route_logits",
    "routing_loss",
]

"""Instance normalization and patching of look-back windows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REVIN_EPS = 1e-5


@dataclass
class RevinStats:
    mean: np.ndarray  # (B, 1)
    std: np.ndarray  # (B, 1), clamped at REVIN_EPS


def revin_normalize(window, eps: float = REVIN_EPS) -> tuple[np.ndarray, RevinStats]:
    """Per-row z-score of a (L,) or (B, L) window; std is clamped at ``eps``."""
    x = np.asarray(window, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("window contains non-finite values")
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    mean = x2.mean(axis=1, keepdims=True)
    std = np.maximum(x2.std(axis=1, keepdims=True), eps)
    out = (x2 - mean) / std
    return (out[0] if squeeze else out), RevinStats(mean, std)


def revin_denormalize(pred, stats: RevinStats) -> np.ndarray:
    p = np.asarray(pred, dtype=np.float64)
    if p.ndim == 1:
        return p * stats.std[0, 0] + stats.mean[0, 0]
    return p * stats.std + stats.mean


def patch_count(L: int, P: int, S: int) -> int:
    if P > L or S > P or S < 1:
        raise ValueError(f"need 1 <= S <= P <= L, got L={L} P={P} S={S}")
    if (L - P) % S:
        raise ValueError(f"(L - P) = {L - P} is not divisible by S = {S}")
    return (L - P) // S + 2


def patchify(window, P: int, S: int) -> np.ndarray:
    """Stride-S slices plus one terminal patch made by repeating the last S values.

    The terminal patch is the last P - S values of the window followed by the
    final S values again, i.e. the window padded by replication then sliced.
    Accepts (L,) or (B, L); returns (N, P) or (B, N, P).
    """
    x = np.asarray(window, dtype=np.float64)
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    L = x2.shape[1]
    n = patch_count(L, P, S)
    padded = np.concatenate([x2, x2[:, L - S :]], axis=1)
    idx = np.arange(n)[:, None] * S + np.arange(P)[None, :]
    out = padded[:, idx]
    return out[0] if squeeze else out

"""Encoder, decoder, pre-alignment attention and the causal transformer backbone."""

from __future__ import annotations

import math

import numpy as np

from ..numkit import Linear, Module, Tensor, ops, parameter

NEG_INF = -1e30
INIT_STD = 0.02


class PatchEncoder(Module):
    """Two-layer MLP applied to every patch: P -> hidden -> M."""

    def __init__(self, P: int, M: int, hidden: int, rng: np.random.Generator):
        self.fc1 = Linear(P, hidden, rng)
        self.fc2 = Linear(hidden, M, rng)

    def __call__(self, patches) -> Tensor:
        return self.fc2(ops.gelu(self.fc1(ops.as_tensor(patches))))


class FlattenDecoder(Module):
    """Flatten the N token states and map them linearly to H values."""

    def __init__(self, N: int, M: int, H: int, rng: np.random.Generator):
        self.N, self.M = N, M
        self.proj = Linear(N * M, H, rng)

    def __call__(self, h: Tensor) -> Tensor:
        if h.shape[-2:] != (self.N, self.M):
            raise ValueError(f"decoder expects (..., {self.N}, {self.M}), got {h.shape}")
        return self.proj(h.reshape(h.shape[:-2] + (self.N * self.M,)))


class PreAlignment(Module):
    """Single-head attention from TS embeddings to principal word embeddings, with residual."""

    def __init__(self, M: int, rng: np.random.Generator):
        self.M = M
        self.wq = Linear(M, M, rng, bias=False)
        self.wk = Linear(M, M, rng, bias=False)
        self.wv = Linear(M, M, rng, bias=False)

    def weights(self, X: Tensor, principal) -> Tensor:
        principal = ops.as_tensor(principal)
        if principal.shape[0] == 0:
            raise ValueError("pre-alignment needs at least one principal embedding")
        q = self.wq(X)
        k = self.wk(principal)
        scores = ops.matmul(q, k.transpose()) * (1.0 / math.sqrt(self.M))
        return ops.softmax(scores, axis=-1)

    def __call__(self, X: Tensor, principal) -> Tensor:
        attn = self.weights(X, principal)
        return X + ops.matmul(attn, self.wv(ops.as_tensor(principal)))


class LayerNorm(Module):
    def __init__(self, M: int):
        self.gain = parameter(np.ones(M))
        self.bias = parameter(np.zeros(M))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gain, self.bias)


class LoRA(Module):
    """Rank-r update A @ B added to a frozen projection; B starts at zero."""

    def __init__(self, M: int, rank: int, rng: np.random.Generator):
        self.A = parameter(rng.normal(0.0, 1.0 / math.sqrt(M), size=(M, rank)))
        self.B = parameter(np.zeros((rank, M)))

    def delta(self) -> np.ndarray:
        return self.A.data @ self.B.data

    def __call__(self, x: Tensor) -> Tensor:
        return ops.matmul(ops.matmul(x, self.A), self.B)


class CausalSelfAttention(Module):
    def __init__(self, M: int, heads: int, layers: int, rng: np.random.Generator):
        if M % heads:
            raise ValueError(f"M={M} is not divisible by heads={heads}")
        self.heads = heads
        self.q = Linear(M, M, rng, std=INIT_STD)
        self.k = Linear(M, M, rng, std=INIT_STD)
        self.v = Linear(M, M, rng, std=INIT_STD)
        self.o = Linear(M, M, rng, std=INIT_STD / math.sqrt(2 * max(layers, 1)))
        self.lora_q: LoRA | None = None
        self.lora_v: LoRA | None = None

    def _split(self, x: Tensor) -> Tensor:
        B, T, M = x.shape
        return x.reshape(B, T, self.heads, M // self.heads).transpose(0, 2, 1, 3)

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        """``mask`` is an additive (B, 1, T, T) array of 0 and NEG_INF."""
        B, T, M = x.shape
        q = self.q(x)
        v = self.v(x)
        if self.lora_q is not None:
            q = q + self.lora_q(x)
        if self.lora_v is not None:
            v = v + self.lora_v(x)
        q, k, v = self._split(q), self._split(self.k(x)), self._split(v)
        scores = ops.matmul(q, k.swapaxes(-1, -2)) * (1.0 / math.sqrt(M // self.heads)) + mask
        out = ops.matmul(ops.softmax(scores, axis=-1), v)
        return self.o(out.transpose(0, 2, 1, 3).reshape(B, T, M))


class Block(Module):
    def __init__(self, M: int, heads: int, layers: int, rng: np.random.Generator, mlp_ratio: int = 4):
        self.ln1 = LayerNorm(M)
        self.attn = CausalSelfAttention(M, heads, layers, rng)
        self.ln2 = LayerNorm(M)
        self.fc = Linear(M, mlp_ratio * M, rng, std=INIT_STD)
        self.proj = Linear(mlp_ratio * M, M, rng, std=INIT_STD / math.sqrt(2 * max(layers, 1)))

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        x = x + self.attn(self.ln1(x), mask)
        return x + self.proj(ops.gelu(self.fc(self.ln2(x))))


def attention_mask(key_valid: np.ndarray) -> np.ndarray:
    """Causal additive mask; a position may attend to earlier valid keys and always to itself."""
    key_valid = np.asarray(key_valid, dtype=bool)
    B, T = key_valid.shape
    causal = np.tril(np.ones((T, T), dtype=bool))
    allowed = causal[None, :, :] & key_valid[:, None, :]
    allowed |= np.eye(T, dtype=bool)[None, :, :]
    return np.where(allowed, 0.0, NEG_INF)[:, None, :, :]


class Backbone(Module):
    """GPT-style stack: token table D, learned positions, pre-LN blocks, final LN.

    The language-model head is tied to D.
    """

    def __init__(self, vocab_size: int, M: int, layers: int, heads: int, context: int, rng: np.random.Generator):
        self.context = context
        self.token_embedding = parameter(rng.normal(0.0, INIT_STD, size=(vocab_size, M)))
        self.position = parameter(rng.normal(0.0, INIT_STD / 2, size=(context, M)))
        self.blocks = [Block(M, heads, layers, rng) for _ in range(layers)]
        self.ln_f = LayerNorm(M)

    def embed_tokens(self, ids: np.ndarray) -> Tensor:
        return ops.embedding(self.token_embedding, ids)

    def __call__(self, embeddings: Tensor, key_valid: np.ndarray | None = None) -> Tensor:
        B, T, _ = embeddings.shape
        if T > self.context:
            raise ValueError(f"sequence length {T} exceeds the positional table ({self.context})")
        if key_valid is None:
            key_valid = np.ones((B, T), dtype=bool)
        mask = attention_mask(key_valid)
        x = embeddings + self.position[:T]
        for block in self.blocks:
            x = block(x, mask)
        return self.ln_f(x)

    def lm_logits(self, ids: np.ndarray, key_valid: np.ndarray | None = None) -> Tensor:
        h = self(self.embed_tokens(ids), key_valid)
        return ops.matmul(h, self.token_embedding.transpose())

    def layer_norms(self) -> list[LayerNorm]:
        out = []
        for b in self.blocks:
            out += [b.ln1, b.ln2]
        return out + [self.ln_f]

"""Next-token pretraining of the backbone on a text corpus."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..data_io import PAD_ID, TEMPLATES, UNK_ID, build_vocab, split_digits, split_words
from ..numkit import AdamW, OptimizerConfig, RngStream, backward, no_grad, ops
from .layers import Backbone

_NAMES = ["etth1", "weather", "traffic", "exchange", "solar", "wind", "sensor", "demand", "load", "flow"]
_UNITS = ["minutes", "hours", "days", "weeks"]
_VERBS = ["rises", "falls", "drifts", "oscillates", "repeats", "switches"]
_NOUNS = ["level", "trend", "cycle", "season", "regime", "pattern", "value", "signal"]


def _num(rng: np.random.Generator) -> str:
    return f"{rng.normal() * 10 ** rng.integers(0, 3):.4g}"


def procedural_corpus(n_sentences: int = 4000, seed: int = 0) -> list[str]:
    """Template sentences about series plus small arithmetic progressions.

    The progressions give the model something structured to predict; the
    template sentences cover the prompt vocabulary.
    """
    rng = np.random.default_rng(seed)
    body = TEMPLATES["generic"]
    out = []
    for i in range(n_sentences):
        kind = i % 4
        if kind == 0:
            text = body.replace("{dataset}", str(rng.choice(_NAMES)))
            text = text.replace("{input length}", str(int(rng.choice([64, 96, 128, 256, 512]))))
            text = text.replace("{prediction length}", str(int(rng.choice([16, 32, 96, 192, 336, 720]))))
            for slot in ("{min value}", "{max value}", "{median value}"):
                text = text.replace(slot, _num(rng))
            out.append(text)
        elif kind == 1:
            a, d = int(rng.integers(-20, 20)), int(rng.integers(1, 6)) * int(rng.choice([-1, 1]))
            seq = " , ".join(str(a + d * k) for k in range(int(rng.integers(5, 10))))
            out.append(f"the sequence {seq} continues .")
        elif kind == 2:
            out.append(
                f"the {rng.choice(_NOUNS)} of the {rng.choice(_NAMES)} series {rng.choice(_VERBS)} "
                f"every {int(rng.integers(1, 60))} {rng.choice(_UNITS)} ."
            )
        else:
            lo, hi = sorted([_num(rng), _num(rng)], key=float)
            out.append(f"the values range from {lo} to {hi} with a median of {_num(rng)} .")
    return out


def load_corpus(path) -> list[str]:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    return [ln for ln in lines if ln]


def corpus_vocab(corpus: list[str], max_size: int = 2048) -> dict[str, int]:
    return build_vocab(list(corpus) + list(TEMPLATES.values()), max_size)


def encode_corpus(corpus: list[str], vocab: dict[str, int]) -> np.ndarray:
    ids = []
    for line in corpus:
        ids.extend(vocab.get(t, UNK_ID) for t in split_digits(split_words(line)))
    return np.asarray(ids, dtype=np.int64)


@dataclass
class PretrainConfig:
    steps: int = 300
    batch: int = 16
    seq_len: int = 48
    lr: float = 1e-3
    eval_every: int = 20
    eval_batches: int = 4
    seed: int = 2026


@dataclass
class PretrainResult:
    train_loss: list[float] = field(default_factory=list)
    eval_loss: list[float] = field(default_factory=list)
    tokens: int = 0


def pretrain_lm(backbone: Backbone, corpus_ids: np.ndarray, cfg: PretrainConfig | None = None) -> PretrainResult:
    """Train backbone and token table on next-token cross-entropy, in place."""
    cfg = cfg or PretrainConfig()
    ids = np.asarray(corpus_ids, dtype=np.int64)
    if ids.size == 0:
        raise ValueError("empty pretraining corpus")
    seq = min(cfg.seq_len, backbone.context)
    if ids.size <= seq + 1:
        raise ValueError(f"corpus of {ids.size} tokens is shorter than one sequence")
    n_params = backbone.num_parameters()
    if ids.size < 10 * n_params:
        warnings.warn(f"pretraining corpus has {ids.size} tokens for {n_params} parameters", stacklevel=2)
    # the last tenth is held out for the loss curve
    cut = int(ids.size * 0.9)
    train_ids, held_ids = ids[:cut], ids[cut:]
    if held_ids.size <= seq + 1:
        held_ids = train_ids
    rng = RngStream(cfg.seed).child("pretrain").generator()
    eval_rng = RngStream(cfg.seed).child("pretrain-eval").generator()
    eval_starts = eval_rng.integers(0, held_ids.size - seq - 1, size=cfg.eval_batches * cfg.batch)
    params = [p for p in backbone.parameters() if p.requires_grad]
    opt = AdamW(params, OptimizerConfig(lr=cfg.lr, total_steps=cfg.steps, clip_norm=1.0))
    result = PretrainResult(tokens=int(ids.size))

    def batch_of(src, starts):
        rows = np.stack([src[s : s + seq + 1] for s in starts])
        return rows[:, :-1], rows[:, 1:]

    def held_out_loss() -> float:
        total = 0.0
        with no_grad():
            for b in range(cfg.eval_batches):
                x, y = batch_of(held_ids, eval_starts[b * cfg.batch : (b + 1) * cfg.batch])
                total += float(ops.cross_entropy(backbone.lm_logits(x), y, ignore_index=PAD_ID).data)
        return total / cfg.eval_batches

    result.eval_loss.append(held_out_loss())
    for step in range(1, cfg.steps + 1):
        x, y = batch_of(train_ids, rng.integers(0, train_ids.size - seq - 1, size=cfg.batch))
        loss = ops.cross_entropy(backbone.lm_logits(x), y, ignore_index=PAD_ID)
        opt.zero_grad()
        backward(loss)
        opt.step()
        result.train_loss.append(float(loss.data))
        if step % cfg.eval_every == 0:
            result.eval_loss.append(held_out_loss())
    return result

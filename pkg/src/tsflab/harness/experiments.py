"""Training, evaluation, ablation, routing and data-ratio studies."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..data_io import DataError, MultivariateSeries, WindowSample, interpolate_missing, load_csv, split, window_count, window_stats
from ..forecaster import (
    ForecastModel,
    ModelConfig,
    corpus_vocab,
    encode_corpus,
    load_corpus,
    pretrain_lm,
    procedural_corpus,
    revin_denormalize,
    revin_normalize,
    trainer_mask,
)
from ..forecaster.layers import Backbone
from ..numkit import AdamW, NumericError, OptimizerConfig, RngStream, backward, no_grad, ops, stream_id_for
from ..router import anneal_tau, gumbel_noise, passing_ratio, routing_loss
from ..synth import GeneratorSpec, generate, series_name
from ..ts_metrics import compute_shifting
from .config import DatasetSpec, ExperimentConfig


class IsolationError(RuntimeError):
    """An out-of-domain window reached a training batch."""


# ---------------------------------------------------------------------------
# Datasets and window pools
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    name: str
    role: str
    series: list[MultivariateSeries]
    split_kind: str = "standard"

    def parts(self, which: str) -> list[MultivariateSeries]:
        idx = {"train": 0, "val": 1, "test": 2}[which]
        return [list(split(s, self.split_kind))[idx] for s in self.series]


def load_dataset(spec: DatasetSpec) -> Dataset:
    if spec.csv is not None:
        series = [interpolate_missing(load_csv(spec.csv, name=spec.name, frequency=spec.frequency))]
    else:
        syn = dict(spec.synthetic)
        attribute = syn.pop("attribute")
        try:
            gspec = GeneratorSpec(attribute=attribute, **syn)
        except TypeError as exc:
            raise DataError(f"dataset {spec.name!r}: {exc}") from exc
        series = [
            MultivariateSeries(
                name=series_name(attribute, gspec.strength, i),
                values=generate(gspec, i)[:, None],
                frequency="synthetic",
                tags={"attribute": attribute, "strength": gspec.strength, "index": i},
            )
            for i in range(gspec.n_series)
        ]
    return Dataset(spec.name, spec.role, series, spec.split)


@dataclass
class WindowPool:
    """Index of (series, channel, start) windows inside one split of one dataset."""

    dataset: str
    role: str
    arrays: list[np.ndarray]  # one (T, d) array per series
    index: np.ndarray  # (n, 3) rows of series, channel, start
    L: int
    H: int

    def __len__(self) -> int:
        return self.index.shape[0]

    def sample(self, k: int) -> WindowSample:
        s, c, t = (int(v) for v in self.index[k])
        col = self.arrays[s][:, c]
        x = col[t : t + self.L]
        return WindowSample(x.copy(), col[t + self.L : t + self.L + self.H].copy(), window_stats(x), self.dataset, c, t)

    def window_id(self, k: int) -> str:
        s, c, t = (int(v) for v in self.index[k])
        return f"{self.dataset}/{s}/{c}/{t}"

    def batch(self, ks) -> tuple[np.ndarray, np.ndarray, list[WindowSample]]:
        samples = [self.sample(k) for k in ks]
        return np.stack([w.input for w in samples]), np.stack([w.target for w in samples]), samples


def build_pool(ds: Dataset, which: str, L: int, H: int, stride: int = 1) -> WindowPool:
    parts = ds.parts(which)
    rows = []
    for si, part in enumerate(parts):
        n = window_count(part.length, L, H, stride)
        for c in range(part.channels):
            for k in range(n):
                rows.append((si, c, k * stride))
    index = np.asarray(rows, dtype=np.int64).reshape(-1, 3)
    return WindowPool(ds.name, ds.role, [p.values for p in parts], index, L, H)


def subsample(n: int, ratio: float, seed: int, label: str) -> np.ndarray:
    """Exactly ceil(ratio * n) window indices, the same subset for a given seed."""
    keep = int(math.ceil(ratio * n))
    if keep >= n:
        return np.arange(n)
    rng = RngStream(seed, stream_id_for("ratio", label)).generator()
    return np.sort(rng.permutation(n)[:keep])


# ---------------------------------------------------------------------------
# Pretraining and model construction
# ---------------------------------------------------------------------------

_PRETRAIN_CACHE: dict[tuple, tuple[dict, dict]] = {}


def _corpus(cfg: ExperimentConfig) -> list[str]:
    return load_corpus(cfg.corpus) if cfg.corpus else procedural_corpus(seed=0)


def pretrained_backbone(mcfg: ModelConfig, cfg: ExperimentConfig, seed: int) -> tuple[dict, dict, list[float]]:
    """Vocabulary and pretrained backbone state; cached per (architecture, corpus, seed)."""
    key = (mcfg.M, mcfg.layers, mcfg.heads, mcfg.context, mcfg.vocab_size, cfg.corpus, repr(cfg.pretrain), seed)
    if key not in _PRETRAIN_CACHE:
        corpus = _corpus(cfg)
        vocab = corpus_vocab(corpus, mcfg.vocab_size)
        rng = RngStream(seed, stream_id_for("pretrain-init")).generator()
        bb = Backbone(mcfg.vocab_size, mcfg.M, mcfg.layers, mcfg.heads, mcfg.context, rng)
        res = pretrain_lm(bb, encode_corpus(corpus, vocab), replace(cfg.pretrain, seed=seed))
        _PRETRAIN_CACHE[key] = (vocab, {k: v.copy() for k, v in bb.state_dict().items()}, res.eval_loss)
    vocab, state, curve = _PRETRAIN_CACHE[key]
    return vocab, {k: v.copy() for k, v in state.items()}, list(curve)


def build_model(mcfg: ModelConfig, cfg: ExperimentConfig, seed: int) -> tuple[ForecastModel, dict]:
    info: dict = {}
    model = ForecastModel(mcfg, seed=seed)
    if mcfg.uses_backbone:
        if mcfg.backbone_variant == "with_pretraining":
            vocab, state, curve = pretrained_backbone(mcfg, cfg, seed)
            model.backbone.load_state_dict(state)
            info["pretrain_eval_loss"] = curve
        else:
            vocab = corpus_vocab(_corpus(cfg), mcfg.vocab_size)
        model.vocab = vocab
    trainer_mask(model)
    return model, info


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass
class TrainResult:
    model: ForecastModel
    losses: list[float]
    window_stream_hash: str
    ood_windows_in_training: int
    n_train_windows: dict[str, int]
    info: dict = field(default_factory=dict)


def _stream_pools(pools: list[WindowPool], cfg: ExperimentConfig, seed: int) -> list[np.ndarray]:
    return [subsample(len(p), cfg.data_ratio, seed, p.dataset) for p in pools]


def train(cfg: ExperimentConfig, mcfg: ModelConfig, datasets: list[Dataset], seed: int, log_every: int = 0) -> TrainResult:
    """Train one model on the train splits of ``datasets`` (cross-dataset interleaving)."""
    pools = []
    for ds in datasets:
        if ds.role != "train":
            raise IsolationError(f"dataset {ds.name!r} has role {ds.role!r} and cannot be trained on")
        pools.append(build_pool(ds, "train", mcfg.L, mcfg.H, cfg.train_stride))
    for p in pools:
        if len(p) == 0:
            raise DataError(f"{p.dataset}: train split too short for L+H={mcfg.L + mcfg.H}")
    keep = _stream_pools(pools, cfg, seed)
    model, info = build_model(mcfg, cfg, seed)
    main_params = [p for name, p in model.named_parameters() if p.requires_grad and not name.startswith("router.")]
    opt = AdamW(main_params, cfg.optimizer)
    rcfg = cfg.routing
    router_opt = None
    if model.router is not None:
        router_opt = AdamW(
            model.router.parameters(),
            OptimizerConfig(
                lr=rcfg.router_lr,
                weight_decay=rcfg.weight_decay,
                clip_norm=rcfg.clip_norm,
                total_steps=cfg.optimizer.total_steps,
                schedule=cfg.optimizer.schedule,
            ),
        )
    order_rng = RngStream(seed, stream_id_for("order")).generator()
    digest = hashlib.sha256()
    ood_seen = 0
    losses = []
    steps = cfg.optimizer.total_steps
    B = cfg.batch_size
    D = len(pools)
    for step in range(1, steps + 1):
        # slot j of the global stream draws from dataset j mod D
        slots = (np.arange(B) + (step - 1) * B) % D
        picks = order_rng.random(B)
        xs, ys, samples = [], [], []
        for j in range(B):
            pool = pools[slots[j]]
            k = int(keep[slots[j]][int(picks[j] * len(keep[slots[j]]))])
            if pool.role != "train":
                ood_seen += 1
                raise IsolationError(f"out-of-domain window {pool.window_id(k)} reached training")
            w = pool.sample(k)
            digest.update(pool.window_id(k).encode())
            xs.append(w.input)
            ys.append(w.target)
            samples.append(w)
        x = np.stack(xs)
        y = np.stack(ys)
        x_norm, stats = revin_normalize(x)
        y_norm = (y - stats.mean) / stats.std
        ids = model.prompt_ids(samples)
        gumbel = None
        tau = 1.0
        if model.router is not None:
            tau = anneal_tau(step - 1, steps, rcfg)
            gumbel = np.stack(
                [gumbel_noise((mcfg.N, 2), RngStream(seed, stream_id_for("gumbel", step, j)).generator()) for j in range(B)]
            )
        out = model.forward_normalized(x_norm, ids, tau=tau, gumbel=gumbel)
        loss = ops.mse_loss(out.pred, y_norm)
        if not math.isfinite(float(loss.data)):
            raise NumericError(f"non-finite training loss at step {step}")
        total = loss
        if out.decision is not None:
            total = loss + routing_loss(out.decision, rcfg)
        model.zero_grad()
        backward(total)
        opt.step()
        if router_opt is not None:
            router_opt.step()
        losses.append(float(loss.data))
        if log_every and step % log_every == 0:
            print(f"step {step} loss {np.mean(losses[-log_every:]):.4f}", flush=True)
    return TrainResult(
        model=model,
        losses=losses,
        window_stream_hash=digest.hexdigest(),
        ood_windows_in_training=ood_seen,
        n_train_windows={p.dataset: int(len(k)) for p, k in zip(pools, keep)},
        info=info,
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass
class EvalResult:
    dataset: str
    role: str
    mae: float
    mse: float
    n_windows: int
    passing_ratio: float | None = None
    predictions: np.ndarray | None = None
    targets: np.ndarray | None = None
    token_pairs: list = field(default_factory=list)


def evaluate_dataset(
    model: ForecastModel,
    ds: Dataset,
    stride: int = 1,
    max_windows: int | None = None,
    keep_predictions: bool = False,
    export_tokens: int = 0,
    batch: int = 256,
) -> EvalResult:
    mcfg = model.cfg
    pool = build_pool(ds, "test", mcfg.L, mcfg.H, stride)
    if len(pool) == 0:
        raise DataError(f"{ds.name}: test split shorter than L+H={mcfg.L + mcfg.H}")
    ks = np.arange(len(pool))
    if max_windows is not None and len(ks) > max_windows:
        ks = ks[np.linspace(0, len(ks) - 1, max_windows).round().astype(np.int64)]
    abs_sum = sq_sum = 0.0
    count = 0
    paths_all = []
    preds, targs, pairs = [], [], []
    for b0 in range(0, len(ks), batch):
        x, y, samples = pool.batch(ks[b0 : b0 + batch])
        x_norm, stats = revin_normalize(x)
        ids = model.prompt_ids(samples)
        with no_grad():
            out = model.forward_normalized(x_norm, ids)
        pred = revin_denormalize(out.pred.data, stats)
        err = pred - y
        abs_sum += float(np.abs(err).sum())
        sq_sum += float((err * err).sum())
        count += err.size
        if out.paths is not None and model.router is not None:
            paths_all.append(out.paths)
            if len(pairs) < export_tokens:
                for i, w in enumerate(samples):
                    delta = compute_shifting(w.input)
                    pairs.extend((ds.name, delta, int(p)) for p in out.paths[i])
        if keep_predictions:
            preds.append(pred)
            targs.append(y)
    ratio = passing_ratio(np.concatenate(paths_all)) if paths_all else None
    return EvalResult(
        dataset=ds.name,
        role=ds.role,
        mae=abs_sum / count,
        mse=sq_sum / count,
        n_windows=int(len(ks)),
        passing_ratio=ratio,
        predictions=np.concatenate(preds) if keep_predictions else None,
        targets=np.concatenate(targs) if keep_predictions else None,
        token_pairs=pairs[:export_tokens],
    )


def spearman(a, b) -> float:
    """Rank correlation with average ranks for ties; nan when a side is constant."""

    def ranks(v):
        v = np.asarray(v, dtype=np.float64)
        order = np.argsort(v, kind="mergesort")
        r = np.empty(v.size)
        r[order] = np.arange(v.size, dtype=np.float64)
        for val in np.unique(v):
            tie = v == val
            if tie.sum() > 1:
                r[tie] = r[tie].mean()
        return r

    ra, rb = ranks(a), ranks(b)
    if ra.std() == 0 or rb.std() == 0:
        return float("nan")
    return float(np.corrcoef(ra, rb)[0, 1])


def suite_shifting(ds: Dataset) -> float:
    """Median shifting over every channel of every series in the dataset."""
    vals = []
    for s in ds.series:
        for c in range(s.channels):
            vals.append(compute_shifting(s.values[:, c]))
    return float(np.median(vals))

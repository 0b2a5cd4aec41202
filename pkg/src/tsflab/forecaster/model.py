"""The forecasting model: RevIN -> patches -> encoder -> [pre-align] -> backbone -> decoder."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass

import numpy as np

from ..data_io import PAD_ID, TEMPLATES, WindowSample, render_prompt, tokenize
from ..numkit import Module, RngStream, Tensor, no_grad, ops, pca_top_d
from ..router import PASS, SKIP, RouterMLP, RoutingDecision, gumbel_softmax_sample, inference_route
from .layers import Backbone, FlattenDecoder, LoRA, PatchEncoder, PreAlignment
from .revin import patch_count, patchify, revin_denormalize, revin_normalize

VARIANTS = ("with_pretraining", "without_pretraining", "without_llm")
ALIGNMENTS = ("pre", "post")
TRAINER_MODES = ("full", "frozen", "pe_ln", "lora")


class ConfigError(ValueError):
    """Invalid or inconsistent model/experiment configuration."""


def parse_trainer_mode(mode: str) -> tuple[str, int | None]:
    """'full' | 'frozen' | 'pe_ln' | 'lora' | 'lora(r)' | 'lora:r'."""
    m = re.fullmatch(r"lora[(:](\d+)\)?", mode)
    if m:
        return "lora", int(m.group(1))
    if mode not in TRAINER_MODES:
        raise ConfigError(f"unknown trainer mode {mode!r}")
    return mode, None


@dataclass
class ModelConfig:
    M: int = 128
    layers: int = 4
    heads: int = 4
    P: int = 32
    S: int = 32
    L: int = 512
    H: int = 96
    d_principal: int = 64
    alignment: str = "post"
    backbone_variant: str = "with_pretraining"
    trainer_mode: str | None = None
    lora_rank: int = 4
    vocab_size: int = 2048
    context: int = 128
    prompt_len: int | None = None
    prompt_enabled: bool = True
    enc_hidden: int | None = None
    routing: bool = False
    router_hidden: int = 32
    template: str = "generic"

    def __post_init__(self):
        if self.alignment not in ALIGNMENTS:
            raise ConfigError(f"alignment must be one of {ALIGNMENTS}")
        if self.backbone_variant not in VARIANTS:
            raise ConfigError(f"backbone_variant must be one of {VARIANTS}")
        if self.M % self.heads:
            raise ConfigError(f"M={self.M} must be divisible by heads={self.heads}")
        if self.P > self.L or self.S > self.P:
            raise ConfigError("need S <= P <= L")
        if (self.L - self.P) % self.S:
            raise ConfigError("(L - P) must be divisible by S")
        if self.trainer_mode is None:
            self.trainer_mode = "frozen" if self.alignment == "pre" else "full"
        mode, rank = parse_trainer_mode(self.trainer_mode)
        if rank is not None:
            self.trainer_mode, self.lora_rank = mode, rank
        if self.alignment == "pre" and self.trainer_mode != "frozen":
            raise ConfigError("pre-alignment keeps the backbone frozen; trainer_mode must be 'frozen'")
        if self.trainer_mode == "lora" and not 0 < self.lora_rank < self.M:
            raise ConfigError(f"lora rank must lie in (0, M={self.M})")
        if self.d_principal > self.vocab_size:
            raise ConfigError("d_principal cannot exceed vocab_size")
        if self.N > self.context:
            raise ConfigError(f"{self.N} patches do not fit a context of {self.context}")
        if self.prompt_len is None:
            self.prompt_len = self.context - self.N
        if self.prompt_len < 0 or self.prompt_len + self.N > self.context:
            raise ConfigError("prompt_len + N must fit the positional table")
        if self.enc_hidden is None:
            self.enc_hidden = self.M
        if self.routing and self.backbone_variant == "without_llm":
            raise ConfigError("routing needs a backbone")

    @property
    def N(self) -> int:
        return patch_count(self.L, self.P, self.S)

    @property
    def uses_backbone(self) -> bool:
        return self.backbone_variant != "without_llm"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ForwardOutput:
    pred: Tensor  # (B, H) on the normalized scale
    decision: RoutingDecision | None = None
    paths: np.ndarray | None = None  # (B, N), 1 = pass
    logits: Tensor | None = None


class ForecastModel(Module):
    def __init__(self, cfg: ModelConfig, seed: int = 2026, vocab: dict[str, int] | None = None):
        self.cfg = cfg
        self._vocab = vocab
        self._prompt_reads = 0
        self._principal_cache: tuple[bytes, np.ndarray] | None = None
        root = RngStream(seed, 0)
        self.encoder = PatchEncoder(cfg.P, cfg.M, cfg.enc_hidden, root.child("encoder").generator())
        self.decoder = FlattenDecoder(cfg.N, cfg.M, cfg.H, root.child("decoder").generator())
        self.align = None
        self.backbone = None
        self.router = None
        if cfg.uses_backbone:
            self.backbone = Backbone(cfg.vocab_size, cfg.M, cfg.layers, cfg.heads, cfg.context, root.child("backbone").generator())
            if cfg.alignment == "pre":
                self.align = PreAlignment(cfg.M, root.child("align").generator())
            if cfg.routing:
                self.router = RouterMLP(cfg.M, cfg.router_hidden, root.child("router").generator())
        self._lora_rng = root.child("lora").generator()

    # -- bookkeeping -----------------------------------------------------------
    @property
    def vocab(self) -> dict[str, int] | None:
        return self._vocab

    @vocab.setter
    def vocab(self, value: dict[str, int]) -> None:
        if len(value) > self.cfg.vocab_size:
            raise ConfigError(f"vocabulary of {len(value)} exceeds vocab_size {self.cfg.vocab_size}")
        self._vocab = value

    @property
    def prompt_reads(self) -> int:
        return self._prompt_reads

    def component_parameters(self, component: str) -> list[Tensor]:
        mod = getattr(self, component)
        return [] if mod is None else mod.parameters()

    def principal_embeddings(self) -> np.ndarray:
        """Top principal directions of the token table, cached while it is unchanged."""
        table = self.backbone.token_embedding.data
        key = table.tobytes()
        if self._principal_cache is None or self._principal_cache[0] != key:
            d = min(self.cfg.d_principal, self.cfg.M, table.shape[0])
            self._principal_cache = (key, pca_top_d(table, d).components)
        return self._principal_cache[1]

    # -- prompts ---------------------------------------------------------------
    def prompt_ids(self, samples: list[WindowSample], template: str | None = None) -> np.ndarray | None:
        """Left-padded (B, prompt_len) ids; the prompt tail (with the statistics) is kept."""
        if not self.cfg.prompt_enabled or not self.cfg.uses_backbone or self.cfg.prompt_len == 0:
            return None
        if self._vocab is None:
            raise ConfigError("prompts are enabled but the model has no vocabulary")
        text = template or TEMPLATES.get(self.cfg.template, self.cfg.template)
        C = self.cfg.prompt_len
        out = np.full((len(samples), C), PAD_ID, dtype=np.int64)
        for i, s in enumerate(samples):
            ids = tokenize(render_prompt(text, s, self.cfg.H), self._vocab).ids[-C:]
            if ids:
                out[i, C - len(ids) :] = ids
        return out

    # -- forward ---------------------------------------------------------------
    def embed_series(self, x_norm: np.ndarray) -> Tensor:
        X = self.encoder(patchify(x_norm, self.cfg.P, self.cfg.S))
        if self.align is not None:
            X = self.align(X, self.principal_embeddings())
        return X

    def forward_normalized(
        self,
        x_norm: np.ndarray,
        prompt_ids: np.ndarray | None = None,
        tau: float = 1.0,
        gumbel: np.ndarray | None = None,
        force_paths: np.ndarray | None = None,
    ) -> ForwardOutput:
        """Forward on RevIN-normalized (B, L) inputs.

        With routing, ``gumbel`` (B, N, 2) selects a relaxed training sample;
        without it the noise-free argmax route is used. ``force_paths`` pins
        the route (1 = pass) for diagnostics.
        """
        x_norm = np.atleast_2d(x_norm)
        B = x_norm.shape[0]
        X = self.embed_series(x_norm)
        if not self.cfg.uses_backbone:
            return ForwardOutput(pred=self.decoder(X))
        N = self.cfg.N
        decision, logits, y = None, None, None
        if self.router is not None:
            logits = self.router(X)
            if force_paths is not None:
                paths = np.asarray(force_paths, dtype=np.int64).reshape(B, N)
                y = Tensor(np.stack([paths, 1 - paths], axis=-1).astype(np.float64))
            elif gumbel is not None:
                decision = gumbel_softmax_sample(logits, tau, g=gumbel)
                paths, y = decision.path, decision.y
            else:
                paths = inference_route(logits)
                y = Tensor(np.stack([paths, 1 - paths], axis=-1).astype(np.float64))
        else:
            paths = np.ones((B, N), dtype=np.int64)
        if prompt_ids is not None and prompt_ids.shape[1] > 0:
            self._prompt_reads += 1
            Z = self.backbone.embed_tokens(prompt_ids)
            seq = ops.concat([Z, X], axis=1)
            key_valid = np.concatenate([prompt_ids != PAD_ID, paths.astype(bool)], axis=1)
            C = prompt_ids.shape[1]
        else:
            seq, key_valid, C = X, paths.astype(bool), 0
        hidden = self.backbone(seq, key_valid)
        h = hidden[:, C:] if C else hidden
        if y is not None:
            h = h * y[:, :, PASS : PASS + 1] + X * y[:, :, SKIP : SKIP + 1]
        return ForwardOutput(pred=self.decoder(h), decision=decision, paths=paths, logits=logits)

    def predict(self, windows: np.ndarray, samples: list[WindowSample] | None = None, return_paths: bool = False):
        """Denormalized forecasts for raw (B, L) windows."""
        x_norm, stats = revin_normalize(np.atleast_2d(windows))
        ids = self.prompt_ids(samples) if samples is not None else None
        with no_grad():
            out = self.forward_normalized(x_norm, ids)
        pred = revin_denormalize(out.pred.data, stats)
        return (pred, out.paths) if return_paths else pred

    # -- trainable subsets -----------------------------------------------------
    def add_lora(self, rank: int) -> None:
        for block in self.backbone.blocks:
            if block.attn.lora_q is None:
                block.attn.lora_q = LoRA(self.cfg.M, rank, self._lora_rng)
                block.attn.lora_v = LoRA(self.cfg.M, rank, self._lora_rng)


def trainer_mask(model: ForecastModel, mode: str | None = None) -> list[str]:
    """Set ``requires_grad`` per the trainer mode and return the trainable names.

    Encoder, decoder, alignment and router always train; the backbone trains
    fully, not at all, only positions and layer norms, or only LoRA adapters.
    """
    cfg = model.cfg
    mode, rank = parse_trainer_mode(mode or cfg.trainer_mode)
    rank = rank or cfg.lora_rank
    if cfg.alignment == "pre" and mode != "frozen":
        raise ConfigError("pre-alignment keeps the backbone frozen")
    if mode == "lora":
        if not 0 < rank < cfg.M:
            raise ConfigError(f"lora rank must lie in (0, M={cfg.M})")
        if model.backbone is not None:
            model.add_lora(rank)
    for name, p in model.named_parameters():
        if not name.startswith("backbone."):
            p.requires_grad = True
            continue
        sub = name[len("backbone.") :]
        if mode == "full":
            p.requires_grad = "lora_" not in sub
        elif mode == "frozen":
            p.requires_grad = False
        elif mode == "pe_ln":
            p.requires_grad = sub == "position" or ".ln" in f".{sub}" and sub.rsplit(".", 1)[-1] in ("gain", "bias")
        else:
            p.requires_grad = "lora_" in sub
    return [n for n, p in model.named_parameters() if p.requires_grad]


def forecast(model: ForecastModel, sample: WindowSample) -> np.ndarray:
    """H predictions for one window."""
    if sample.input.size != model.cfg.L:
        raise ValueError(f"window length {sample.input.size} != L={model.cfg.L}")
    return model.predict(sample.input[None, :], [sample])[0]

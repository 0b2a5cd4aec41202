"""Patch-token forecaster with a small causal transformer backbone."""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .layers import Backbone, FlattenDecoder, LoRA, PatchEncoder, PreAlignment, attention_mask
from .model import (
    ALIGNMENTS,
    TRAINER_MODES,
    VARIANTS,
    ConfigError,
    ForecastModel,
    ForwardOutput,
    ModelConfig,
    forecast,
    parse_trainer_mode,
    trainer_mask,
)
from .pretrain import PretrainConfig, PretrainResult, corpus_vocab, encode_corpus, load_corpus, pretrain_lm, procedural_corpus
from .revin import REVIN_EPS, RevinStats, patch_count, patchify, revin_denormalize, revin_normalize

__all__ = [
    "ALIGNMENTS",
    "Backbone",
    "CheckpointError",
    "ConfigError",
    "FlattenDecoder",
    "ForecastModel",
    "ForwardOutput",
    "LoRA",
    "ModelConfig",
    "PatchEncoder",
    "PreAlignment",
    "PretrainConfig",
    "PretrainResult",
    "REVIN_EPS",
    "RevinStats",
    "TRAINER_MODES",
    "VARIANTS",
    "attention_mask",
    "corpus_vocab",
    "encode_corpus",
    "forecast",
    "load_checkpoint",
    "load_corpus",
    "parse_trainer_mode",
    "patch_count",
    "patchify",
    "pretrain_lm",
    "procedural_corpus",
    "revin_denormalize",
    "revin_normalize",
    "save_checkpoint",
    "trainer_mask",
]

"""Autodiff, optimizer and linear-algebra kernels shared by every module."""

from .linalg import OLSResult, PCAResult, ols_fit, pca_top_d
from .module import Linear, Module
from .optim import AdamState, AdamW, NumericError, OptimizerConfig, adamw_step, clip_gradients, cosine_lr
from .rng import DEFAULT_SEED, RngStream, stream_id_for
from .tensor import GraphError, Tensor, backward, eval_precision, no_grad, parameter
from . import tensor as ops

__all__ = [
    "AdamState",
    "AdamW",
    "DEFAULT_SEED",
    "GraphError",
    "Linear",
    "Module",
    "NumericError",
    "OLSResult",
    "OptimizerConfig",
    "PCAResult",
    "RngStream",
    "Tensor",
    "adamw_step",
    "backward",
    "clip_gradients",
    "cosine_lr",
    "eval_precision",
    "no_grad",
    "ols_fit",
    "ops",
    "parameter",
    "pca_top_d",
    "stream_id_for",
]

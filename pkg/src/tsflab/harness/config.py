"""Declarative experiment configuration (YAML or plain dicts)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from ..forecaster import ConfigError, ModelConfig, PretrainConfig
from ..numkit import OptimizerConfig
from ..router import RoutingConfig

ROLES = ("train", "ood_test")
PARADIGMS = ("single_dataset", "cross_dataset")
DEFAULT_SEEDS = (2026, 2027, 2028)
DEFAULT_HORIZONS = (96, 192, 336, 720)


@dataclass
class DatasetSpec:
    name: str
    role: str = "train"
    csv: str | None = None
    synthetic: dict | None = None
    split: str = "standard"
    frequency: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigError(f"dataset {self.name!r}: role must be one of {ROLES}")
        if (self.csv is None) == (self.synthetic is None):
            raise ConfigError(f"dataset {self.name!r}: give exactly one of csv or synthetic")
        if self.split not in ("ett", "standard"):
            raise ConfigError(f"dataset {self.name!r}: split must be 'ett' or 'standard'")


@dataclass
class ExperimentConfig:
    datasets: list[DatasetSpec]
    model: ModelConfig = field(default_factory=ModelConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    routing: RoutingConfig | None = None
    pretrain: PretrainConfig = field(default_factory=PretrainConfig)
    corpus: str | None = None
    horizons: list[int] = field(default_factory=lambda: list(DEFAULT_HORIZONS))
    paradigm: str = "cross_dataset"
    data_ratio: float = 1.0
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    batch_size: int = 32
    train_stride: int = 1
    eval_stride: int = 1
    max_eval_windows: int | None = None
    dump_predictions: bool = False
    export_tokens: int = 2000

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate dataset names in {names}")
        if not any(d.role == "train" for d in self.datasets):
            raise ConfigError("no dataset has role 'train'")
        if self.paradigm not in PARADIGMS:
            raise ConfigError(f"paradigm must be one of {PARADIGMS}")
        if not 0.0 < self.data_ratio <= 1.0:
            raise ConfigError("data_ratio must lie in (0, 1]")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.horizons or any(h < 1 for h in self.horizons):
            raise ConfigError("horizons must be positive")
        if self.batch_size < 1 or self.train_stride < 1 or self.eval_stride < 1:
            raise ConfigError("batch_size and strides must be positive")
        if self.routing is not None and not self.model.routing:
            self.model = _replace_model(self.model, routing=True)
        if self.model.routing and self.routing is None:
            self.routing = RoutingConfig()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["routing"] = None if self.routing is None else asdict(self.routing)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _replace_model(cfg: ModelConfig, **changes) -> ModelConfig:
    d = cfg.to_dict()
    d.update(changes)
    return ModelConfig(**d)


def _build(cls, data: dict | None, label: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{label}: unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{label}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{label}: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    data = dict(data)
    datasets = [_build(DatasetSpec, d, "dataset") for d in data.pop("datasets", [])]
    model = _build(ModelConfig, data.pop("model", None), "model")
    optimizer = _build(OptimizerConfig, data.pop("optimizer", None), "optimizer")
    routing_raw = data.pop("routing", None)
    routing = None if routing_raw in (None, False) else _build(RoutingConfig, {} if routing_raw is True else routing_raw, "routing")
    pretrain = _build(PretrainConfig, data.pop("pretrain", None), "pretrain")
    data.update(datasets=datasets, model=model, optimizer=optimizer, routing=routing, pretrain=pretrain)
    return _build(ExperimentConfig, data, "experiment")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(raw or {})


def with_overrides(cfg: ExperimentConfig, seed: int | None = None, **model_changes) -> ExperimentConfig:
    d = cfg.to_dict()
    if seed is not None:
        d["seeds"] = [int(seed)]
    if model_changes:
        d["model"].update(model_changes)
    return config_from_dict(d)


__all__ = [
    "DatasetSpec",
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
    "with_overrides",
]

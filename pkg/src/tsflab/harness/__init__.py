"""Experiment orchestration: training, evaluation, ablations, routing and sweeps."""

from .config import DatasetSpec, ExperimentConfig, config_from_dict, load_config, with_overrides
from .experiments import (
    Dataset,
    EvalResult,
    IsolationError,
    TrainResult,
    WindowPool,
    build_model,
    build_pool,
    evaluate_dataset,
    load_dataset,
    spearman,
    subsample,
    suite_shifting,
    train,
)
from .runner import (
    ABLATION_VARIANTS,
    Run,
    ablation_table,
    dumps_report,
    read_predictions,
    run_ablate,
    run_evaluate,
    run_route_report,
    run_sweep,
    write_outputs,
)

__all__ = [
    "ABLATION_VARIANTS",
    "Dataset",
    "DatasetSpec",
    "EvalResult",
    "ExperimentConfig",
    "IsolationError",
    "Run",
    "TrainResult",
    "WindowPool",
    "ablation_table",
    "build_model",
    "build_pool",
    "config_from_dict",
    "dumps_report",
    "evaluate_dataset",
    "load_config",
    "load_dataset",
    "read_predictions",
    "run_ablate",
    "run_evaluate",
    "run_route_report",
    "run_sweep",
    "spearman",
    "subsample",
    "suite_shifting",
    "train",
    "with_overrides",
    "write_outputs",
]

"""Experiment drivers that assemble deterministic reports."""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import replace
from pathlib import Path

import numpy as np

from .. import __version__
from ..forecaster import ConfigError, ModelConfig, save_checkpoint
from ..ts_metrics import profile
from .config import ExperimentConfig
from .experiments import Dataset, EvalResult, TrainResult, evaluate_dataset, load_dataset, spearman, suite_shifting, train

METRICS_VERSION = "metrics-v1"
ABLATION_VARIANTS = ("with_pretraining", "without_pretraining", "without_llm")


def _clean(v):
    if isinstance(v, float):
        return None if not math.isfinite(v) else v
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _load_all(cfg: ExperimentConfig) -> list[Dataset]:
    return [load_dataset(d) for d in cfg.datasets]


def _dataset_profile(ds: Dataset) -> dict:
    fields = ("shifting", "stationarity", "transition", "seasonality", "trend")
    per = {f: [] for f in fields}
    for s in ds.series:
        prof = profile(s.values)
        for f in fields:
            v = getattr(prof, f)
            if v is not None:
                per[f].append(v)
    return {f: (float(np.median(v)) if v else None) for f, v in per.items()}


class Run:
    """Train and evaluate models for every (variant, ratio, horizon, seed) cell."""

    def __init__(self, cfg: ExperimentConfig, datasets: list[Dataset] | None = None, out_dir: Path | None = None):
        self.cfg = cfg
        self.datasets = datasets if datasets is not None else _load_all(cfg)
        self.out_dir = out_dir
        self.rows: list[dict] = []
        self.training: list[dict] = []
        self.token_pairs: list[tuple] = []
        self.predictions: list[tuple[str, np.ndarray, np.ndarray]] = []
        self.ood_counter = 0

    def model_config(self, horizon: int, **changes) -> ModelConfig:
        d = self.cfg.model.to_dict()
        d["H"] = int(horizon)
        d.update(changes)
        return ModelConfig(**d)

    def train_groups(self) -> list[list[Dataset]]:
        train_sets = [d for d in self.datasets if d.role == "train"]
        if self.cfg.paradigm == "cross_dataset":
            return [train_sets]
        return [[d] for d in train_sets]

    def cell(self, seed: int, horizon: int, variant: str | None = None, ratio: float | None = None, tag: str = "") -> list[TrainResult]:
        cfg = self.cfg if ratio is None else replace(self.cfg, data_ratio=ratio)
        changes = {} if variant is None else {"backbone_variant": variant}
        if variant == "without_llm" and cfg.model.routing:
            changes["routing"] = False
        mcfg = self.model_config(horizon, **changes)
        results = []
        for group in self.train_groups():
            res = train(cfg, mcfg, group, seed)
            self.ood_counter += res.ood_windows_in_training
            group_names = [d.name for d in group]
            eval_sets = group + [d for d in self.datasets if d.role == "ood_test"]
            label = {"seed": seed, "horizon": horizon, "variant": mcfg.backbone_variant, "ratio": cfg.data_ratio, "trained_on": group_names}
            self.training.append(
                {
                    **label,
                    "first_loss": res.losses[0],
                    "final_loss": float(np.mean(res.losses[-max(1, len(res.losses) // 20) :])),
                    "steps": len(res.losses),
                    "window_stream_hash": res.window_stream_hash,
                    "n_train_windows": res.n_train_windows,
                    "n_parameters": res.model.num_parameters(),
                    "n_trainable": sum(p.size for p in res.model.trainable_parameters()),
                    **({"pretrain_eval_loss": res.info["pretrain_eval_loss"]} if "pretrain_eval_loss" in res.info else {}),
                }
            )
            for ds in eval_sets:
                ev: EvalResult = evaluate_dataset(
                    res.model,
                    ds,
                    stride=cfg.eval_stride,
                    max_windows=cfg.max_eval_windows,
                    keep_predictions=cfg.dump_predictions,
                    export_tokens=cfg.export_tokens if res.model.router is not None else 0,
                )
                self.rows.append(
                    {
                        **{k: v for k, v in label.items() if k != "trained_on"},
                        "trained_on": "+".join(group_names),
                        "dataset": ds.name,
                        "role": ds.role,
                        "mae": ev.mae,
                        "mse": ev.mse,
                        "n_windows": ev.n_windows,
                        "passing_ratio": ev.passing_ratio,
                    }
                )
                self.token_pairs.extend((seed, mcfg.backbone_variant) + p for p in ev.token_pairs)
                if cfg.dump_predictions:
                    self.predictions.append((f"{ds.name}|{horizon}|{seed}|{mcfg.backbone_variant}|{cfg.data_ratio}", ev.predictions, ev.targets))
            if self.out_dir is not None and tag:
                ck = self.out_dir / "checkpoints"
                ck.mkdir(parents=True, exist_ok=True)
                save_checkpoint(res.model, ck / f"{tag}-{'+'.join(group_names)}-h{horizon}-s{seed}.tsfl")
            results.append(res)
        return results

    # -- aggregation -----------------------------------------------------------
    def aggregates(self) -> list[dict]:
        """Horizon-averaged metrics per seed, then seed mean/std/median."""
        groups: dict[tuple, dict[int, list[tuple[float, float]]]] = {}
        for r in self.rows:
            key = (r["variant"], r["ratio"], r["trained_on"], r["dataset"])
            groups.setdefault(key, {}).setdefault(r["seed"], []).append((r["mae"], r["mse"]))
        out = []
        for (variant, ratio, trained_on, dataset), by_seed in sorted(groups.items(), key=lambda kv: tuple(map(str, kv[0]))):
            mae = np.array([np.mean([m for m, _ in v]) for _, v in sorted(by_seed.items())])
            mse = np.array([np.mean([s for _, s in v]) for _, v in sorted(by_seed.items())])
            out.append(
                {
                    "variant": variant,
                    "ratio": ratio,
                    "trained_on": trained_on,
                    "dataset": dataset,
                    "seeds": sorted(by_seed),
                    "mae_per_seed": mae.tolist(),
                    "mse_per_seed": mse.tolist(),
                    "mae_mean": float(mae.mean()),
                    "mae_std": float(mae.std()),
                    "mae_median": float(np.median(mae)),
                    "mse_mean": float(mse.mean()),
                    "mse_std": float(mse.std()),
                }
            )
        return out

    def report(self, kind: str, extra: dict | None = None) -> dict:
        rows = sorted(self.rows, key=lambda r: (r["variant"], r["ratio"], r["trained_on"], r["dataset"], r["horizon"], r["seed"]))
        return {
            "kind": kind,
            "provenance": f"tsflab {__version__}",
            "metrics_version": METRICS_VERSION,
            "config": self.cfg.to_dict(),
            "config_hash": self.cfg.config_hash(),
            "results": rows,
            "aggregates": self.aggregates(),
            "training": sorted(self.training, key=lambda t: (t["variant"], t["ratio"], str(t["trained_on"]), t["horizon"], t["seed"])),
            "ood_windows_in_training": self.ood_counter,
            "profiles": {d.name: _dataset_profile(d) for d in self.datasets},
            **(extra or {}),
        }


# ---------------------------------------------------------------------------
# Public drivers
# ---------------------------------------------------------------------------


def run_evaluate(cfg: ExperimentConfig, out_dir: Path | None = None, checkpoints: bool = False) -> tuple[dict, Run]:
    run = Run(cfg, out_dir=out_dir)
    for seed in cfg.seeds:
        for h in cfg.horizons:
            run.cell(seed, h, tag="model" if checkpoints else "")
    return run.report("evaluate"), run


def run_ablate(cfg: ExperimentConfig, variants=ABLATION_VARIANTS, out_dir: Path | None = None) -> tuple[dict, Run]:
    run = Run(cfg, out_dir=out_dir)
    for v in variants:
        for seed in cfg.seeds:
            for h in cfg.horizons:
                run.cell(seed, h, variant=v)
    table = ablation_table(run.rows)
    return run.report("ablate", {"ablation_table": table}), run


def ablation_table(rows: list[dict]) -> list[dict]:
    """One row per (dataset, horizon): seed-mean MAE/MSE per variant with best flags."""
    cells: dict[tuple, dict[str, list]] = {}
    for r in rows:
        cells.setdefault((r["dataset"], r["horizon"]), {}).setdefault(r["variant"], []).append((r["mae"], r["mse"]))
    out = []
    for (dataset, horizon), per in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        entry = {"dataset": dataset, "horizon": horizon}
        means = {v: (float(np.mean([a for a, _ in x])), float(np.mean([b for _, b in x]))) for v, x in per.items()}
        best_mae = min(m for m, _ in means.values())
        best_mse = min(s for _, s in means.values())
        for v, (m, s) in sorted(means.items()):
            entry[v] = {"mae": m, "mse": s, "best_mae": m == best_mae, "best_mse": s == best_mse}
        out.append(entry)
    return out


def run_route_report(cfg: ExperimentConfig, variants=("with_pretraining", "without_pretraining"), out_dir: Path | None = None) -> tuple[dict, Run]:
    if cfg.routing is None:
        raise ConfigError("route-report needs routing enabled in the config")
    run = Run(cfg, out_dir=out_dir)
    deltas = {d.name: suite_shifting(d) for d in run.datasets}
    for v in variants:
        for seed in cfg.seeds:
            for h in cfg.horizons:
                run.cell(seed, h, variant=v)
    ratio_table, corr = [], []
    for v in variants:
        for seed in cfg.seeds:
            rows = [r for r in run.rows if r["variant"] == v and r["seed"] == seed]
            per_ds: dict[str, list[float]] = {}
            for r in rows:
                per_ds.setdefault(r["dataset"], []).append(r["passing_ratio"])
            names = sorted(per_ds)
            ratios = [float(np.mean(per_ds[n])) for n in names]
            for n, rt in zip(names, ratios):
                ratio_table.append({"variant": v, "seed": seed, "dataset": n, "role": next(d.role for d in run.datasets if d.name == n), "passing_ratio": rt, "shifting": deltas[n]})
            corr.append({"variant": v, "seed": seed, "spearman_shifting_ratio": spearman([deltas[n] for n in names], ratios)})
    return run.report("route_report", {"passing_ratios": ratio_table, "correlations": corr, "suite_shifting": deltas}), run


def run_sweep(cfg: ExperimentConfig, ratios, out_dir: Path | None = None) -> tuple[dict, Run]:
    ratios = [float(r) for r in ratios]
    if not ratios or any(not 0.0 < r <= 1.0 for r in ratios):
        raise ConfigError("sweep ratios must lie in (0, 1]")
    if ratios != sorted(ratios) or len(set(ratios)) != len(ratios):
        raise ConfigError("sweep ratios must be strictly ascending")
    run = Run(cfg, out_dir=out_dir)
    for ratio in ratios:
        for seed in cfg.seeds:
            for h in cfg.horizons:
                run.cell(seed, h, ratio=ratio)
    table = []
    for ratio in ratios:
        rows = [r for r in run.rows if r["ratio"] == ratio]
        table.append(
            {
                "ratio": ratio,
                "mae": float(np.mean([r["mae"] for r in rows])),
                "mse": float(np.mean([r["mse"] for r in rows])),
                "mae_per_seed": [float(np.mean([r["mae"] for r in rows if r["seed"] == s])) for s in cfg.seeds],
            }
        )
    return run.report("sweep", {"sweep_table": table, "ratios": ratios}), run


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------


def _write_csv(path: Path, rows: list[dict]) -> None:
    if not rows:
        path.write_text("")
        return
    cols = sorted({k for r in rows for k in r})
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(_clean(v)) if isinstance(v, (list, dict)) else _clean(v) for k, v in r.items()})


def write_outputs(out_dir, report: dict, run: Run | None = None) -> Path:
    out = Path(out_dir)
    tables = out / "tables"
    tables.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps_report(report))
    _write_csv(tables / "results.csv", report.get("results", []))
    _write_csv(tables / "aggregates.csv", report.get("aggregates", []))
    for key in ("ablation_table", "passing_ratios", "correlations", "sweep_table"):
        if key in report:
            rows = report[key]
            if key == "ablation_table":
                rows = [{"dataset": r["dataset"], "horizon": r["horizon"], **{f"{v}_{m}": r[v][m] for v in r if isinstance(r[v], dict) for m in r[v]}} for r in rows]
            _write_csv(tables / f"{key}.csv", rows)
    if run is not None and run.token_pairs:
        _write_csv(
            tables / "token_decisions.csv",
            [{"seed": s, "variant": v, "dataset": d, "shifting": x, "pass": p} for s, v, d, x, p in run.token_pairs],
        )
    if run is not None and run.predictions:
        write_predictions(out / "predictions.bin", run.predictions)
    return out / "report.json"


def write_predictions(path, entries: list[tuple[str, np.ndarray, np.ndarray]]) -> None:
    """Per entry: key length (u32), UTF-8 key, rows and cols (u32), predictions then targets (<f8)."""
    with Path(path).open("wb") as fh:
        fh.write(b"TSFP")
        fh.write(struct.pack("<I", len(entries)))
        for key, pred, targ in entries:
            kb = key.encode("utf-8")
            fh.write(struct.pack("<I", len(kb)))
            fh.write(kb)
            fh.write(struct.pack("<II", *pred.shape))
            fh.write(np.ascontiguousarray(pred, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(targ, dtype="<f8").tobytes())


def read_predictions(path) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    raw = Path(path).read_bytes()
    if raw[:4] != b"TSFP":
        raise ValueError("not a predictions dump")
    (n,) = struct.unpack("<I", raw[4:8])
    off = 8
    out = {}
    for _ in range(n):
        (kl,) = struct.unpack("<I", raw[off : off + 4])
        off += 4
        key = raw[off : off + kl].decode("utf-8")
        off += kl
        r, c = struct.unpack("<II", raw[off : off + 8])
        off += 8
        size = 8 * r * c
        pred = np.frombuffer(raw[off : off + size], dtype="<f8").reshape(r, c)
        off += size
        targ = np.frombuffer(raw[off : off + size], dtype="<f8").reshape(r, c)
        off += size
        out[key] = (pred.copy(), targ.copy())
    return out

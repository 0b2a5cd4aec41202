"""Command-line entry point: profile, synth, train, evaluate, ablate, route-report, sweep."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data_io import DataError, interpolate_missing, load_csv, save_csv
from .forecaster import CheckpointError, ConfigError, load_checkpoint
from .harness import (
    ABLATION_VARIANTS,
    Run,
    config_from_dict,
    dumps_report,
    evaluate_dataset,
    load_config,
    run_ablate,
    run_evaluate,
    run_route_report,
    run_sweep,
    write_outputs,
)
from .numkit import NumericError
from .synth import ATTRIBUTES, GeneratorSpec, gen_suite
from .ts_metrics import ProfileConfig, profile

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        d = cfg.to_dict()
        d["seeds"] = [int(args.seed)]
        cfg = config_from_dict(d)
    return cfg


def cmd_profile(args) -> dict:
    pcfg = ProfileConfig(m=args.m, period=args.period)
    out = {}
    for path in args.inputs:
        series = interpolate_missing(load_csv(path))
        agg, channels = profile(series.values, pcfg, return_channels=True)
        out[series.name] = {"aggregate": agg.to_dict(), "channels": [c.to_dict() for c in channels]}
    return {"kind": "profile", "profiles": out, "m": args.m, "period": args.period}


def cmd_synth(args) -> dict:
    spec = GeneratorSpec(args.attribute, length=args.length, n_series=args.n, seed=args.seed if args.seed is not None else 2026)
    suite = gen_suite(args.attribute, args.levels, spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for m, sp in zip(suite.series, suite.splits):
        fname = f"{m.name}.csv"
        save_csv(m, out / fname)
        entries.append({"file": fname, **m.tags, "split": list(sp.bounds)})
    manifest = {
        "kind": "synth",
        "attribute": args.attribute,
        "levels": suite.strength_levels,
        "length": spec.length,
        "n_series": spec.n_series,
        "seed": spec.seed,
        "series": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def cmd_evaluate_checkpoint(args, cfg) -> dict:
    model = load_checkpoint(args.checkpoint)
    run = Run(cfg)
    rows = []
    for ds in run.datasets:
        ev = evaluate_dataset(model, ds, stride=cfg.eval_stride, max_windows=cfg.max_eval_windows)
        rows.append({"dataset": ds.name, "role": ds.role, "horizon": model.cfg.H, "mae": ev.mae, "mse": ev.mse, "n_windows": ev.n_windows, "passing_ratio": ev.passing_ratio})
    return {"kind": "evaluate_checkpoint", "checkpoint": Path(args.checkpoint).name, "config_hash": cfg.config_hash(), "results": rows}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsflab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="YAML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override the config seeds with one seed")
        sp.add_argument("--out", default="runs/out", help="output directory")

    sp = sub.add_parser("profile", help="property profile of CSV series")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--m", type=int, default=16)
    sp.add_argument("--period", type=int, default=None)
    sp.add_argument("--out", default=None, help="output directory (report.json); stdout if absent")

    sp = sub.add_parser("synth", help="generate a synthetic suite")
    sp.add_argument("--attribute", choices=ATTRIBUTES, required=True)
    sp.add_argument("--levels", type=float, nargs="+", default=[0.1, 0.5, 0.9])
    sp.add_argument("--length", type=int, default=20000)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default="runs/synth")

    for name in ("train", "evaluate", "ablate", "route-report"):
        sp = sub.add_parser(name)
        common(sp)
        if name == "evaluate":
            sp.add_argument("--checkpoint", default=None, help="evaluate a saved model instead of training")
        if name == "ablate":
            sp.add_argument("--variants", nargs="+", default=None)
    sp = sub.add_parser("sweep")
    common(sp)
    sp.add_argument("--ratios", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    return p


def run_command(args) -> dict:
    if args.command == "profile":
        return cmd_profile(args)
    if args.command == "synth":
        return cmd_synth(args)
    cfg = _config(args)
    out = Path(args.out)
    if args.command == "train":
        report, run = run_evaluate(cfg, out_dir=out, checkpoints=True)
        report["kind"] = "train"
    elif args.command == "evaluate":
        if args.checkpoint:
            report, run = cmd_evaluate_checkpoint(args, cfg), None
        else:
            report, run = run_evaluate(cfg, out_dir=out)
    elif args.command == "ablate":
        variants = tuple(args.variants) if args.variants else ABLATION_VARIANTS
        report, run = run_ablate(cfg, variants=variants, out_dir=out)
    elif args.command == "route-report":
        report, run = run_route_report(cfg, out_dir=out)
    else:
        report, run = run_sweep(cfg, args.ratios, out_dir=out)
    write_outputs(out, report, run)
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run_command(args)
    except (ConfigError, CheckpointError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "profile":
        text = dumps_report(report)
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "report.json").write_text(text)
        else:
            sys.stdout.write(text)
    elif args.command != "synth":
        print(f"wrote {Path(args.out) / 'report.json'}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

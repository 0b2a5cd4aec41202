"""Harness drivers, isolation, determinism and the command-line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from tsflab.cli import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, EXIT_OK, main
from tsflab.data_io import MultivariateSeries, save_csv
from tsflab.forecaster import ConfigError
from tsflab.harness import (
    IsolationError,
    config_from_dict,
    dumps_report,
    load_config,
    load_dataset,
    read_predictions,
    run_ablate,
    run_evaluate,
    run_route_report,
    run_sweep,
    spearman,
    subsample,
    train,
    write_outputs,
)

MODEL = dict(M=16, layers=1, heads=2, P=16, S=16, L=64, H=8, context=12, vocab_size=96, d_principal=8, prompt_len=7)


def tiny_cfg(**kw):
    d = dict(
        datasets=[
            dict(name="a", synthetic=dict(attribute="seasonality", strength=0.5, length=1024, n_series=2)),
            dict(name="b", synthetic=dict(attribute="trend", strength=0.5, length=1024, n_series=1)),
            dict(name="c", role="ood_test", synthetic=dict(attribute="shifting", strength=0.5, length=1024, n_series=1)),
        ],
        model=dict(MODEL),
        optimizer=dict(total_steps=6),
        pretrain=dict(steps=4, batch=4, seq_len=8, eval_every=2, eval_batches=1),
        horizons=[8],
        seeds=[11],
        batch_size=4,
        max_eval_windows=16,
    )
    d.update(kw)
    return d


@pytest.fixture(autouse=True)
def _quiet(recwarn):
    """Tiny pretraining corpora always warn; that warning is covered elsewhere."""
    yield


def test_config_round_trip_and_errors(tmp_path):
    cfg = config_from_dict(tiny_cfg())
    assert cfg.routing is None and cfg.paradigm == "cross_dataset"
    assert config_from_dict(cfg.to_dict()).config_hash() == cfg.config_hash()
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(tiny_cfg()))
    assert load_config(path).config_hash() == cfg.config_hash()
    bad = [
        dict(datasets=[]),
        dict(paradigm="federated"),
        dict(data_ratio=0.0),
        dict(seeds=[]),
        dict(bogus=1),
        dict(model=dict(MODEL, M=15)),
        dict(datasets=[dict(name="x", role="ood_test", synthetic=dict(attribute="trend"))]),
        dict(datasets=[dict(name="x", csv="a.csv", synthetic=dict(attribute="trend"))]),
    ]
    for change in bad:
        with pytest.raises(ConfigError):
            config_from_dict(tiny_cfg(**change))
    routed = config_from_dict(tiny_cfg(routing=True))
    assert routed.model.routing and routed.routing.target_ratio == 0.5


def test_subsample_is_exact_and_stable():
    a = subsample(100, 0.25, 3, "x")
    assert a.size == 25 and np.array_equal(a, subsample(100, 0.25, 3, "x"))
    assert not np.array_equal(a, subsample(100, 0.25, 4, "x"))
    assert subsample(7, 0.5, 0, "y").size == 4
    np.testing.assert_array_equal(subsample(10, 1.0, 0, "z"), np.arange(10))


def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    assert np.isnan(spearman([1, 2, 3], [5, 5, 5]))


def test_training_refuses_ood_dataset():
    cfg = config_from_dict(tiny_cfg())
    ood = load_dataset(cfg.datasets[2])
    with pytest.raises(IsolationError):
        train(cfg, cfg.model, [ood], 11)


def test_evaluate_report_and_isolation(tmp_path):
    cfg = config_from_dict(tiny_cfg(dump_predictions=True))
    report, run = run_evaluate(cfg)
    assert report["ood_windows_in_training"] == 0
    assert {r["dataset"] for r in report["results"]} == {"a", "b", "c"}
    assert report["training"][0]["trained_on"] == ["a", "b"]
    assert report["training"][0]["n_train_windows"] == {"a": 2 * (716 - 72 + 1), "b": 716 - 72 + 1}
    assert all(r["n_windows"] == 16 for r in report["results"])
    write_outputs(tmp_path, report, run)
    back = json.loads((tmp_path / "report.json").read_text())
    assert back["config_hash"] == cfg.config_hash()
    assert (tmp_path / "tables" / "results.csv").read_text().startswith("dataset,")
    preds = read_predictions(tmp_path / "predictions.bin")
    assert len(preds) == 3
    pred, targ = next(iter(preds.values()))
    assert pred.shape == targ.shape == (16, 8)


def test_single_dataset_paradigm_trains_one_model_per_set():
    report, _ = run_evaluate(config_from_dict(tiny_cfg(paradigm="single_dataset")))
    assert sorted(tuple(t["trained_on"]) for t in report["training"]) == [("a",), ("b",)]
    # each model is scored on its own set and on the held-out set
    assert len(report["results"]) == 4


def test_reports_are_byte_identical():
    cfg = config_from_dict(tiny_cfg(routing=True))
    a, _ = run_evaluate(cfg)
    b, _ = run_evaluate(config_from_dict(tiny_cfg(routing=True)))
    assert dumps_report(a) == dumps_report(b)
    c, _ = run_evaluate(config_from_dict(tiny_cfg(routing=True, seeds=[12])))
    assert dumps_report(a) != dumps_report(c)


def test_ablate_route_report_and_sweep():
    rep, _ = run_ablate(config_from_dict(tiny_cfg()))
    row = rep["ablation_table"][0]
    assert {"with_pretraining", "without_pretraining", "without_llm"} <= set(row)
    assert sum(row[v]["best_mae"] for v in ("with_pretraining", "without_pretraining", "without_llm")) >= 1

    with pytest.raises(ConfigError):
        run_route_report(config_from_dict(tiny_cfg()))
    rep, run = run_route_report(config_from_dict(tiny_cfg(routing=True, export_tokens=10)))
    assert len(rep["correlations"]) == 2
    assert all(0.0 <= r["passing_ratio"] <= 1.0 for r in rep["passing_ratios"])
    assert set(rep["suite_shifting"]) == {"a", "b", "c"}
    assert run.token_pairs and all(p[-1] in (0, 1) for p in run.token_pairs)

    rep, _ = run_sweep(config_from_dict(tiny_cfg()), [0.5, 1.0])
    assert [r["ratio"] for r in rep["sweep_table"]] == [0.5, 1.0]
    t = {tuple(x["trained_on"]) + (x["ratio"],): x["n_train_windows"] for x in rep["training"]}
    assert t[("a", "b", 0.5)]["b"] == int(np.ceil(0.5 * 645))
    for bad in ([], [0.0, 1.0], [1.0, 0.5], [0.5, 0.5]):
        with pytest.raises(ConfigError):
            run_sweep(config_from_dict(tiny_cfg()), bad)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _write_cfg(tmp_path, **kw):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(tiny_cfg(**kw)))
    return str(path)


def test_cli_synth_and_profile(tmp_path, capsys):
    out = tmp_path / "syn"
    code = main(["synth", "--attribute", "trend", "--levels", "0.1", "0.9", "--length", "1024", "--n", "2", "--seed", "5", "--out", str(out)])
    assert code == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["levels"] == [0.1, 0.9] and len(manifest["series"]) == 4
    assert manifest["series"][0]["split"] == [716, 102, 206]
    files = sorted(p.name for p in out.glob("*.csv"))
    assert files == sorted(e["file"] for e in manifest["series"])

    capsys.readouterr()
    code = main(["profile", str(out / manifest["series"][-1]["file"])])
    assert code == EXIT_OK
    prof = json.loads(capsys.readouterr().out)
    agg = next(iter(prof["profiles"].values()))["aggregate"]
    assert agg["trend"] > 0.5

    code = main(["profile", str(out / manifest["series"][0]["file"]), "--out", str(tmp_path / "p")])
    assert code == EXIT_OK and (tmp_path / "p" / "report.json").exists()


def test_cli_train_then_evaluate_checkpoint(tmp_path):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "run"
    assert main(["train", "--config", cfg, "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["kind"] == "train" and rep["ood_windows_in_training"] == 0
    ckpts = sorted((out / "checkpoints").glob("*.tsfl"))
    assert len(ckpts) == 1
    ev = tmp_path / "ev"
    assert main(["evaluate", "--config", cfg, "--checkpoint", str(ckpts[0]), "--out", str(ev)]) == EXIT_OK
    ev_rep = json.loads((ev / "report.json").read_text())
    got = {r["dataset"]: r["mae"] for r in ev_rep["results"]}
    want = {r["dataset"]: r["mae"] for r in rep["results"]}
    assert got == pytest.approx(want, rel=1e-12)


def test_cli_same_seed_gives_same_bytes(tmp_path):
    cfg = _write_cfg(tmp_path)
    for name in ("one", "two"):
        assert main(["evaluate", "--config", cfg, "--seed", "3", "--out", str(tmp_path / name)]) == EXIT_OK
    assert (tmp_path / "one" / "report.json").read_bytes() == (tmp_path / "two" / "report.json").read_bytes()
    assert json.loads((tmp_path / "one" / "report.json").read_text())["config"]["seeds"] == [3]


def test_cli_exit_codes(tmp_path):
    bad_yaml = tmp_path / "bad.yaml"
    bad_yaml.write_text("model: [unclosed\n")
    assert main(["train", "--config", str(bad_yaml), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert main(["train", "--config", str(tmp_path / "absent.yaml"), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert main(["train", "--config", _write_cfg(tmp_path, model=dict(MODEL, heads=3)), "--out", str(tmp_path / "x")]) == EXIT_CONFIG

    missing = _write_cfg(tmp_path, datasets=[dict(name="m", csv=str(tmp_path / "nope.csv"))])
    assert main(["train", "--config", missing, "--out", str(tmp_path / "x")]) == EXIT_DATA
    short = tmp_path / "short.csv"
    save_csv(MultivariateSeries("short", np.arange(40.0)), short)
    cfg = _write_cfg(tmp_path, datasets=[dict(name="s", csv=str(short))])
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "x")]) == EXIT_DATA

    huge = tmp_path / "huge.csv"
    save_csv(MultivariateSeries("huge", np.random.default_rng(0).normal(size=1024)), huge)
    cfg = _write_cfg(tmp_path, datasets=[dict(name="h", csv=str(huge))], optimizer=dict(total_steps=6, lr=1e200))
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "x")]) == EXIT_NUMERIC

    ck = tmp_path / "broken.tsfl"
    ck.write_bytes(b"nope")
    assert main(["evaluate", "--config", _write_cfg(tmp_path), "--checkpoint", str(ck), "--out", str(tmp_path / "x")]) == EXIT_CONFIG


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "tsflab.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("profile", "synth", "train", "evaluate", "ablate", "route-report", "sweep"):
        assert name in res.stdout

import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli.app import OUTPUT_ROOT_ENV, main, replicate_seeds
from src.storage.event_log_io import read_event_log
from src.storage.manifest import MANIFEST_NAME, RunManifest

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def hawkes_config(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({
        "K": 2,
        "mu": [0.8, 0.5, 0.2],
        "A": [[0.6, 0.0, 0.05], [0.0, 0.4, 0.05], [0.1, 0.1, 0.2]],
        "horizon": 60.0,
        "seed": 2,
    }), encoding="utf-8")
    return path


@pytest.fixture
def netsim_file(tmp_path):
    path = tmp_path / "netsim.json"
    path.write_text(json.dumps({"n_nodes": 40, "horizon_pre": 10, "horizon_lp": 10,
                                "activity_rate": 0.3, "embedding_dim": 4}), encoding="utf-8")
    return path


def test_simulate_writes_log_summary_and_manifest(tmp_path, hawkes_config):
    out = tmp_path / "sim"
    assert main(["simulate", str(hawkes_config), "--out", str(out)]) == 0
    log = read_event_log(out / "events.jsonl")
    assert log.horizon == 60.0 and len(log) > 0
    summary = pd.read_csv(out / "summary.csv")
    assert summary.loc[0, "n_events"] == len(log)
    manifest = RunManifest.load(out)
    assert manifest.command == "simulate"
    assert manifest.seed == 2
    assert "events_2" in manifest.outputs


def test_simulate_is_byte_identical_per_seed(tmp_path, hawkes_config):
    for name in ("a", "b"):
        assert main(["simulate", str(hawkes_config), "--seed", "9", "--out", str(tmp_path / name)]) == 0
    first = (tmp_path / "a" / "events.jsonl").read_bytes()
    assert first == (tmp_path / "b" / "events.jsonl").read_bytes()
    assert main(["simulate", str(hawkes_config), "--seed", "10", "--out", str(tmp_path / "c")]) == 0
    assert first != (tmp_path / "c" / "events.jsonl").read_bytes()


def test_replicates_get_their_own_directories(tmp_path, hawkes_config):
    out = tmp_path / "reps"
    assert main(["simulate", str(hawkes_config), "--replicates", "3", "--format", "csv",
                 "--out", str(out)]) == 0
    for r in range(3):
        assert (out / f"replicate_{r:03d}" / "events.csv").exists()
        assert (out / f"replicate_{r:03d}" / "events.meta.json").exists()
    summary = pd.read_csv(out / "summary.csv")
    assert summary["replicate"].tolist() == [0, 1, 2]
    assert summary["seed"].nunique() == 3


def test_replicate_seeds():
    assert replicate_seeds(7, 1) == [7]
    seeds = replicate_seeds(7, 4)
    assert seeds == replicate_seeds(7, 4)
    assert len(set(seeds)) == 4


def test_zero_horizon_is_a_usage_error(tmp_path, hawkes_config):
    out = tmp_path / "never"
    assert main(["simulate", str(hawkes_config), "--horizon", "0", "--out", str(out)]) == 1
    assert not (out / MANIFEST_NAME).exists()


def test_exit_codes_for_bad_input(tmp_path):
    assert main(["simulate", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text('{"K": 2,', encoding="utf-8")
    assert main(["simulate", str(broken), "--out", str(tmp_path / "y")]) == 1
    assert main(["estimate", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "z")]) == 2
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_version_exits_cleanly(capsys):
    assert main(["--version"]) == 0
    assert "homophily" in capsys.readouterr().out


def test_estimate_writes_fits_per_window(tmp_path, hawkes_config):
    sim = tmp_path / "sim"
    assert main(["simulate", str(hawkes_config), "--out", str(sim)]) == 0
    out = tmp_path / "fit"
    assert main(["estimate", str(sim / "events.jsonl"), "--breakpoints", "30", "--mu-mode", "count",
                 "--grid-points", "61", "--out", str(out)]) == 0
    document = json.loads((out / "fits.json").read_text(encoding="utf-8"))
    assert [w["window"] for w in document["windows"]] == [[0.0, 30.0], [30.0, 60.0]]
    assert document["pairs"] == ["(1,1)", "(2,2)", "(1,2)"]
    table = pd.read_csv(out / "regime_table.csv")
    assert len(table) == 2 * 3 * 2
    assert (out / "alpha_matrix_window0.csv").exists()
    assert (out / "alpha_matrix_window1.csv").exists()
    assert len(pd.read_csv(out / "bias.csv")) == 61
    assert "nan" not in (out / "bias.csv").read_text(encoding="utf-8").lower()


def test_estimate_rejects_fixed_mode_and_bad_windows(tmp_path, hawkes_config):
    sim = tmp_path / "sim"
    main(["simulate", str(hawkes_config), "--out", str(sim)])
    log = str(sim / "events.jsonl")
    assert main(["estimate", log, "--mu-mode", "fixed", "--out", str(tmp_path / "a")]) == 1
    assert main(["estimate", log, "--mu-from-window", "10", "--out", str(tmp_path / "b")]) == 1
    assert main(["estimate", log, "--breakpoints", "30,30", "--out", str(tmp_path / "c")]) == 1


def test_analyze_schedule_with_bound(tmp_path):
    out = tmp_path / "an"
    assert main(["analyze", str(CONFIGS / "stability.json"), "--verify-bound", "--grid-points", "181",
                 "--out", str(out)]) == 0
    stability = json.loads((out / "stability.json").read_text(encoding="utf-8"))
    assert [r["regime"] for r in stability["regimes"]] == ["subcritical"] * 3
    assert stability["bound"]["checked"] and stability["bound"]["passed"]
    assert len(stability["stationary_bias"]) == 3
    margins = pd.read_csv(out / "margins.csv")
    assert margins["passed"].all()
    trajectory = pd.read_csv(out / "trajectory.csv")
    assert list(trajectory.columns) == ["t", "lambda_(1,1)", "lambda_(2,2)", "lambda_(1,2)"]


def test_supercritical_analysis_is_not_a_failure(tmp_path):
    path = tmp_path / "hot.json"
    path.write_text(json.dumps({"K": 1, "mu": [0.5], "A": [[3.0]], "horizon": 1000.0}), encoding="utf-8")
    out = tmp_path / "hot"
    assert main(["analyze", str(path), "--verify-bound", "--step", "0.05", "--out", str(out)]) == 0
    stability = json.loads((out / "stability.json").read_text(encoding="utf-8"))
    assert stability["regimes"][0]["regime"] == "supercritical"
    assert stability["regimes"][0]["stationary"] is None
    assert stability["stationary_bias"] == [None]
    assert stability["bound"]["checked"] is False
    assert 350.0 < stability["overflow_time"] < 360.0
    assert not (out / "margins.csv").exists()
    for name in ("trajectory.csv", "bias.csv"):
        text = (out / name).read_text(encoding="utf-8").lower()
        assert "inf" not in text and "nan" not in text
    trajectory = pd.read_csv(out / "trajectory.csv")
    assert trajectory["t"].iloc[-1] == 1000.0
    assert trajectory["lambda_(1,1)"].isna().iloc[-1]


def test_analyze_accepts_fits(tmp_path, hawkes_config):
    sim, fit, out = tmp_path / "sim", tmp_path / "fit", tmp_path / "an"
    main(["simulate", str(hawkes_config), "--out", str(sim)])
    main(["estimate", str(sim / "events.jsonl"), "--breakpoints", "30", "--out", str(fit)])
    assert main(["analyze", str(fit / "fits.json"), "--out", str(out)]) == 0
    table = pd.read_csv(out / "window_bias.csv")
    assert table["window_start"].tolist() == [0.0, 30.0]


def test_analyze_reports_config_positions(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "K": 1,\n  "mu": [0.5],\n  "horizon": "long"\n}', encoding="utf-8")
    assert main(["analyze", str(path), "--out", str(tmp_path / "x")]) == 1


def test_netsim_runs_each_policy_and_period(tmp_path, netsim_file):
    out = tmp_path / "net"
    assert main(["netsim", "--config", str(netsim_file), "--policy", "homophily-boost", "cross-boost",
                 "--retrain", "0", "5", "--out", str(out)]) == 0
    for name in ("homophily-boost_retrain0", "homophily-boost_retrain5", "cross-boost_retrain0"):
        for file in ("edges.csv", "events.jsonl", "audit.csv", "fits.json", "alpha_matrix.csv",
                     "mu_matrix.csv", "bias.csv"):
            assert (out / name / file).exists()
    summary = pd.read_csv(out / "summary.csv")
    assert len(summary) == 4
    assert sorted(summary["retrain_period"].unique()) == [0, 5]


def test_netsim_unknown_policy(tmp_path, netsim_file):
    assert main(["netsim", "--config", str(netsim_file), "--policy", "most-popular",
                 "--out", str(tmp_path / "x")]) == 1


def test_replay_reproduces_outputs(tmp_path, hawkes_config):
    first = tmp_path / "first"
    assert main(["simulate", str(hawkes_config), "--out", str(first)]) == 0
    second = tmp_path / "second"
    assert main(["replay", str(first / MANIFEST_NAME), "--out", str(second)]) == 0
    assert (first / "events.jsonl").read_bytes() == (second / "events.jsonl").read_bytes()
    assert main(["replay", str(tmp_path / "nowhere")]) == 2


def test_default_output_root_from_environment(tmp_path, monkeypatch, hawkes_config):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    assert main(["simulate", str(hawkes_config)]) == 0
    (run_dir,) = list((tmp_path / "root").iterdir())
    assert run_dir.name.startswith("simulate-")
    assert (run_dir / MANIFEST_NAME).exists()


def test_reproduce_convergence(tmp_path):
    out = tmp_path / "conv"
    assert main(["reproduce", "convergence", "--out", str(out)]) == 0
    three = json.loads((out / "stability_three-interval.json").read_text(encoding="utf-8"))
    shear = json.loads((out / "stability_non-normal.json").read_text(encoding="utf-8"))
    assert three["passed"] is True
    assert shear["passed"] is False
    assert shear["failing_intervals"] == [1]
    assert "margins_non-normal" in RunManifest.load(out).outputs

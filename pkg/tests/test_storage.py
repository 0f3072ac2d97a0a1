import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.bias.metrics import BiasSeries
from src.errors import ConfigError, DataIOError
from src.estimation.fit import DiagonalFit
from src.models.event_log import EventLog
from src.storage.config import load_hawkes_config, load_netsim_config, parse_config
from src.storage.event_log_io import (
    read_event_log,
    sidecar_path,
    write_event_log,
    write_event_log_csv,
)
from src.storage.exports import (
    read_json,
    regime_table,
    write_bias_csv,
    write_csv,
    write_group_matrix_csv,
    write_json,
)
from src.storage.manifest import MANIFEST_NAME, RunManifest

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_jsonl_layout(tmp_path, small_log):
    path = tmp_path / "events.jsonl"
    write_event_log(small_log, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == '{"K": 2, "horizon": 4}'
    assert lines[2] == '{"t": 1, "i": 1, "j": 2}'
    assert len(lines) == 5
    assert read_event_log(path) == small_log


def test_jsonl_keeps_full_precision(tmp_path):
    log = EventLog.from_events(1, [(0.1, (1, 1)), (1 / 3, (1, 1))], 1.0)
    write_event_log(log, tmp_path / "e.jsonl")
    np.testing.assert_array_equal(read_event_log(tmp_path / "e.jsonl").times, log.times)


def test_malformed_event_names_its_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"K": 2, "horizon": 5}\n{"t": 1.0, "i": 1, "j": 1}\n{"t": "x", "i": 1}\n',
                    encoding="utf-8")
    with pytest.raises(DataIOError, match=r"bad.jsonl:3:"):
        read_event_log(path)


def test_malformed_header_and_bad_contents(tmp_path):
    header = tmp_path / "header.jsonl"
    header.write_text('{"groups": 2}\n', encoding="utf-8")
    with pytest.raises(DataIOError, match=r":1:"):
        read_event_log(header)
    unsorted = tmp_path / "unsorted.jsonl"
    unsorted.write_text('{"K": 1, "horizon": 5}\n{"t": 2, "i": 1, "j": 1}\n{"t": 1, "i": 1, "j": 1}\n',
                        encoding="utf-8")
    with pytest.raises(DataIOError):
        read_event_log(unsorted)
    with pytest.raises(DataIOError):
        read_event_log(tmp_path / "missing.jsonl")


def test_csv_log_needs_its_sidecar(tmp_path, small_log):
    path = tmp_path / "events.csv"
    write_event_log_csv(small_log, path)
    assert sidecar_path(path).name == "events.meta.json"
    assert path.read_text(encoding="utf-8").splitlines()[0] == "t,i,j"
    assert read_event_log(path) == small_log
    sidecar_path(path).unlink()
    with pytest.raises(DataIOError):
        read_event_log(path)


def test_csv_log_rejects_unknown_columns(tmp_path, small_log):
    path = tmp_path / "events.csv"
    write_event_log_csv(small_log, path)
    path.write_text("time,i,j\n0.5,1,1\n", encoding="utf-8")
    with pytest.raises(DataIOError, match="expected columns"):
        read_event_log(path)


def test_shipped_configs_load():
    two_group = load_hawkes_config(CONFIGS / "two_group.json")
    assert two_group.horizon == 200.0 and two_group.schedule is None
    regimes = load_hawkes_config(CONFIGS / "regimes.json")
    assert regimes.regime_mode == "reweight"
    np.testing.assert_array_equal(regimes.schedule.breakpoints, [0.0, 500.0, 1000.0, 1500.0])
    stability = load_hawkes_config(CONFIGS / "stability.json")
    np.testing.assert_array_equal(stability.params.A, stability.schedule.matrices[0])
    assert stability.regime_mode == "freeze"
    netsim = load_netsim_config(CONFIGS / "netsim_three_groups.json")
    assert netsim.n_nodes == 300 and netsim.horizon == 600


def test_config_syntax_error_has_a_position():
    with pytest.raises(ConfigError) as info:
        parse_config('{\n  "K": 2,\n  "mu": [0.1, 0.2,\n}', "hawkes", "bad.json")
    assert info.value.line == 4
    assert str(info.value).startswith("bad.json:4:")


def test_unknown_key_is_located():
    text = '{\n  "K": 1,\n  "mu": [0.5],\n  "horizon": 10,\n  "colour": "red"\n}'
    with pytest.raises(ConfigError) as info:
        parse_config(text, "hawkes", "run.json")
    assert (info.value.line, info.value.column) == (5, 3)
    assert "colour" in str(info.value)


def test_type_choice_and_required_checks():
    with pytest.raises(ConfigError, match="type int"):
        parse_config('{"K": 1.5, "mu": [0.5], "horizon": 10}', "hawkes")
    with pytest.raises(ConfigError, match="must be one of"):
        parse_config('{"K": 1, "mu": [0.5], "horizon": 10, "regime_mode": "smooth"}', "hawkes")
    with pytest.raises(ConfigError, match="missing required key 'horizon'"):
        parse_config('{"K": 1, "mu": [0.5]}', "hawkes")
    loaded = parse_config('{"K": 1, "mu": [0.5], "horizon": 10}', "hawkes")
    assert loaded["beta"] == 1.0 and loaded["regime_mode"] == "reweight"


def test_domain_errors_point_at_their_key(tmp_path):
    path = tmp_path / "short.json"
    path.write_text('{\n  "K": 2,\n  "mu": [0.5],\n  "horizon": 10\n}', encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_hawkes_config(path)
    assert info.value.line == 3
    path.write_text('{\n  "n_nodes": 2,\n  "n_groups": 3\n}', encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_netsim_config(path)
    assert str(path) in str(info.value)


def test_missing_config_is_an_io_error(tmp_path):
    with pytest.raises(DataIOError):
        load_hawkes_config(tmp_path / "nope.json")


def test_manifest_write_and_load(tmp_path):
    manifest = RunManifest("simulate", ["simulate", "--config", "a.json"], config={"horizon": 5.0})
    manifest.seed = 3
    manifest.add_input("config", "a.json")
    manifest.update_config({"seed": 3})
    manifest.add_output("events", tmp_path / "events.jsonl")
    manifest.finish()
    manifest.write(tmp_path)
    loaded = RunManifest.load(tmp_path)
    assert loaded.to_dict() == manifest.to_dict()
    assert loaded.config == {"horizon": 5.0, "seed": 3}
    data = json.loads((tmp_path / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert data["finished"].endswith("Z")
    assert len(data["run_id"]) == 36


def test_malformed_manifest(tmp_path):
    (tmp_path / MANIFEST_NAME).write_text('{"argv": []}', encoding="utf-8")
    with pytest.raises(DataIOError, match="malformed manifest"):
        RunManifest.load(tmp_path)


def test_exports_never_write_nan_tokens(tmp_path):
    write_json({"a": float("nan"), "b": [np.float64(1.5), np.inf]}, tmp_path / "x.json")
    assert read_json(tmp_path / "x.json") == {"a": None, "b": [1.5, None]}
    series = BiasSeries([0.0, 1.0], [np.nan, 0.5], [0.25, np.nan], source="realised")
    write_bias_csv(series, tmp_path / "bias.csv")
    lines = (tmp_path / "bias.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["t,b_emp,b_inst,source", "0,,0.25,realised", "1,0.5,,realised"]
    write_csv(pd.DataFrame({"x": [1.0, np.inf, -np.inf], "label": ["a", "b", "c"]}), tmp_path / "inf.csv")
    lines = (tmp_path / "inf.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["x,label", "1,a", ",b", ",c"]


def test_csv_floats_round_trip(tmp_path):
    write_csv(pd.DataFrame({"x": [0.1, 1 / 3]}), tmp_path / "x.csv")
    values = pd.read_csv(tmp_path / "x.csv", float_precision="round_trip")["x"].to_numpy()
    np.testing.assert_array_equal(values, [0.1, 1 / 3])


def test_regime_table_rows():
    fit = DiagonalFit(1, [0.5], [0.3], 1.0, [-1.0], (0.0, 10.0), ["ok"])
    table = regime_table([fit], truth=[([0.6], [0.4])])
    assert list(table["parameter"]) == ["alpha", "mu"]
    assert list(table["true"]) == [0.4, 0.6]
    assert list(table["estimate"]) == [0.3, 0.5]
    assert set(table["pair"]) == {"(1,1)"}


def test_group_matrix_csv(tmp_path):
    write_group_matrix_csv([[1.0, 2.0], [2.0, 3.0]], tmp_path / "m.csv", "alpha")
    frame = pd.read_csv(tmp_path / "m.csv")
    assert list(frame.columns) == ["group_row", "group_col", "alpha"]
    assert frame["alpha"].tolist() == [1.0, 2.0, 2.0, 3.0]


def test_unwritable_output_is_an_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(DataIOError):
        write_json({}, blocker / "sub" / "x.json")

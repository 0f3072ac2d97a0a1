"""
Flat JSON run configurations checked against the in-repo schema

Every error names the file, line and column of the offending key.
"""
import json
import logging
import re
from pathlib import Path

import numpy as np

from src.errors import ConfigError, DataIOError, ValidationError
from src.models.hawkes_params import HawkesParams
from src.models.group_pair import n_pairs
from src.models.regime_schedule import RegimeSchedule
from src.models.sim_config import SimConfig

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).with_name("config_schema.json")
KINDS = ("hawkes", "netsim")


def load_schema():
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def _position(text, key):
    """(line, column) of the first occurrence of "key": in the raw text"""
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    if match is None:
        return 1, 1
    start = match.start()
    line = text.count("\n", 0, start) + 1
    column = start - (text.rfind("\n", 0, start) + 1) + 1
    return line, column


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_vector(value):
    return isinstance(value, list) and all(_is_number(x) for x in value)


def _is_matrix(value):
    return (isinstance(value, list) and len(value) > 0 and all(_is_vector(row) for row in value)
            and len({len(row) for row in value}) == 1)


TYPE_CHECKS = {
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "float": _is_number,
    "bool": lambda v: isinstance(v, bool),
    "str": lambda v: isinstance(v, str),
    "vector": _is_vector,
    "matrix": _is_matrix,
    "matrix_list": lambda v: isinstance(v, list) and len(v) > 0 and all(_is_matrix(m) for m in v),
}


class LoadedConfig:
    """Validated values of one config file plus where they came from"""

    def __init__(self, kind, values, path, text):
        self._kind = kind
        self._values = values
        self._path = Path(path) if path is not None else None
        self._text = text

    @property
    def kind(self):
        return self._kind

    @property
    def values(self):
        return dict(self._values)

    @property
    def path(self):
        return self._path

    def __getitem__(self, key):
        return self._values[key]

    def error(self, key, message):
        """ConfigError located at a key of this file"""
        line, column = _position(self._text, key) if self._text else (None, None)
        return ConfigError(message, self._path, line, column)

    def snapshot(self):
        """Values without defaults that are null, for manifests"""
        return {k: v for k, v in self._values.items() if v is not None}


def parse_config(text, kind, path=None):
    """
    Parse and type-check config text

    Args:
        text: Raw JSON text
        kind: "hawkes" or "netsim"
        path: Source path for diagnostics

    Returns:
        LoadedConfig: Values with defaults filled in

    Raises:
        ConfigError: Syntax errors, unknown keys, missing keys or wrong types
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown config kind {kind!r}", path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", path, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ConfigError("a config file must hold a JSON object", path, 1, 1)

    schema = load_schema()[kind]
    values = {}
    for key, value in data.items():
        if key not in schema:
            line, column = _position(text, key)
            raise ConfigError(f"unknown key {key!r} for a {kind} config", path, line, column)
        entry = schema[key]
        if value is None and not entry.get("required", False):
            values[key] = None
            continue
        if not TYPE_CHECKS[entry["type"]](value):
            line, column = _position(text, key)
            raise ConfigError(f"key {key!r} must be of type {entry['type']}", path, line, column)
        if "choices" in entry and value not in entry["choices"]:
            line, column = _position(text, key)
            raise ConfigError(f"key {key!r} must be one of {entry['choices']}, got {value!r}", path, line, column)
        values[key] = value

    for key, entry in schema.items():
        if key in values:
            continue
        if entry.get("required", False):
            raise ConfigError(f"missing required key {key!r}", path, 1, 1)
        values[key] = entry.get("default")
    return LoadedConfig(kind, values, path, text)


def load_config(path, kind):
    """Read and parse a config file"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise DataIOError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config(text, kind, path)


class HawkesRunConfig:
    """
    Simulation setup from a hawkes config

    Attributes mirror the config keys. The schedule is absent unless both breakpoints
    and matrices are given.
    """

    def __init__(self, params, horizon, seed=0, schedule=None, regime_mode="reweight", description=""):
        self._params = params
        self._horizon = float(horizon)
        self._seed = int(seed)
        self._schedule = schedule
        self._regime_mode = regime_mode
        self._description = description
        if self._horizon <= 0:
            raise ValidationError(f"horizon must be > 0, got {horizon}")

    @property
    def params(self):
        return self._params

    @property
    def horizon(self):
        return self._horizon

    @property
    def seed(self):
        return self._seed

    @property
    def schedule(self):
        return self._schedule

    @property
    def regime_mode(self):
        return self._regime_mode

    @property
    def description(self):
        return self._description

    def with_overrides(self, horizon=None, seed=None):
        return HawkesRunConfig(self._params,
                               self._horizon if horizon is None else horizon,
                               self._seed if seed is None else seed,
                               self._schedule, self._regime_mode, self._description)

    def to_dict(self):
        data = {"description": self._description, **self._params.to_dict(), "horizon": self._horizon,
                "seed": self._seed, "regime_mode": self._regime_mode}
        if self._schedule is not None:
            data.update(self._schedule.to_dict())
        return data


def hawkes_config_from(loaded):
    """
    Build a HawkesRunConfig from parsed values

    Raises:
        ConfigError: Values fail domain validation, located at the responsible key
    """
    K = loaded["K"]
    if K < 1:
        raise loaded.error("K", f"K must be >= 1, got {K}")
    size = n_pairs(K)
    if len(loaded["mu"]) != size:
        raise loaded.error("mu", f"mu must have G = K(K+1)/2 = {size} entries, got {len(loaded['mu'])}")

    schedule = None
    breakpoints, matrices = loaded["breakpoints"], loaded["matrices"]
    if (breakpoints is None) != (matrices is None):
        key = "breakpoints" if breakpoints is not None else "matrices"
        raise loaded.error(key, "breakpoints and matrices must be given together")
    if matrices is not None:
        try:
            schedule = RegimeSchedule(breakpoints, matrices)
        except ValidationError as exc:
            raise loaded.error("breakpoints", str(exc)) from exc
        if schedule.dimension != size:
            raise loaded.error("matrices", f"schedule matrices must be {size}x{size}")

    A = loaded["A"]
    if A is None:
        A = schedule.matrices[0] if schedule is not None else np.zeros((size, size))
    try:
        params = HawkesParams(K, loaded["mu"], A, loaded["beta"])
    except ValidationError as exc:
        key = "beta" if "beta" in str(exc) else ("mu" if "mu" in str(exc) or "baseline" in str(exc) else "A")
        raise loaded.error(key, str(exc)) from exc
    if loaded["horizon"] <= 0:
        raise loaded.error("horizon", f"horizon must be > 0, got {loaded['horizon']}")
    if schedule is not None and schedule.end > loaded["horizon"]:
        raise loaded.error("breakpoints", f"last breakpoint {schedule.end} exceeds horizon {loaded['horizon']}")
    return HawkesRunConfig(params, loaded["horizon"], loaded["seed"], schedule, loaded["regime_mode"],
                           loaded["description"])


def load_hawkes_config(path):
    return hawkes_config_from(load_config(path, "hawkes"))


def sim_config_from(loaded):
    values = {k: v for k, v in loaded.values.items() if k != "description"}
    if values.get("prob_matrix") is None:
        values.pop("prob_matrix", None)
    try:
        return SimConfig.from_dict(values)
    except ValidationError as exc:
        message = str(exc)
        key = next((k for k in values if k in message), "n_nodes")
        raise loaded.error(key, message) from exc


def load_netsim_config(path):
    return sim_config_from(load_config(path, "netsim"))

import json
import logging
from pathlib import Path

import pandas as pd

from src.errors import DataIOError, ValidationError
from src.models.event_log import EventLog
from src.models.group_pair import GroupPair, all_pairs

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
FORMAT_NAME = "group-pair event log"
FORMAT_VERSION = "1.0"


def _format_float(value):
    return FLOAT_FORMAT % value


def write_event_log(log, path):
    """
    Write an event log as JSONL: a header line, then one event per line

    Args:
        log: EventLog
        path: Output .jsonl path
    """
    path = Path(path)
    pairs = all_pairs(log.n_groups)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f'{{"K": {log.n_groups}, "horizon": {_format_float(log.horizon)}}}\n')
            for t, mark in zip(log.times, log.marks):
                pair = pairs[mark]
                f.write(f'{{"t": {_format_float(t)}, "i": {pair.i}, "j": {pair.j}}}\n')
    except OSError as exc:
        raise DataIOError(f"cannot write event log {path}: {exc}") from exc
    logger.info("Wrote %d events to %s", len(log), path)


def read_event_log(path):
    """
    Read a JSONL event log, or a CSV log with its sidecar metadata

    Args:
        path: .jsonl or .csv path

    Returns:
        EventLog: Loaded log

    Raises:
        DataIOError: Missing, unreadable or malformed file
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_event_log_csv(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise DataIOError(f"cannot read event log {path}: {exc}") from exc

    if not lines:
        raise DataIOError(f"{path}: empty file, expected a header line")
    try:
        header = json.loads(lines[0])
        n_groups, horizon = int(header["K"]), float(header["horizon"])
    except (ValueError, KeyError, TypeError) as exc:
        raise DataIOError(f"{path}:1: malformed header: {exc}") from exc

    events = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            events.append((float(record["t"]), GroupPair(record["i"], record["j"])))
        except (ValueError, KeyError, TypeError) as exc:
            raise DataIOError(f"{path}:{number}: malformed event: {exc}") from exc
    try:
        return EventLog.from_events(n_groups, events, horizon)
    except ValidationError as exc:
        raise DataIOError(f"{path}: {exc}") from exc


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_event_log_csv(log, path):
    """Write t,i,j rows plus a sidecar <name>.meta.json carrying K and the horizon"""
    path = Path(path)
    pairs = all_pairs(log.n_groups)
    frame = pd.DataFrame({
        "t": log.times,
        "i": [pairs[m].i for m in log.marks],
        "j": [pairs[m].j for m in log.marks],
    })
    metadata = {
        "K": log.n_groups,
        "horizon": log.horizon,
        "metadata": {"format": FORMAT_NAME, "version": FORMAT_VERSION},
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        with open(sidecar_path(path), "w", encoding="utf-8") as f:
            json.dump(metadata, f, indent=2)
    except OSError as exc:
        raise DataIOError(f"cannot write event log {path}: {exc}") from exc


def read_event_log_csv(path):
    path = Path(path)
    try:
        with open(sidecar_path(path), "r", encoding="utf-8") as f:
            metadata = json.load(f)
        frame = pd.read_csv(path, float_precision="round_trip", dtype={"i": "int64", "j": "int64"})
    except (OSError, ValueError) as exc:
        raise DataIOError(f"cannot read event log {path}: {exc}") from exc
    if list(frame.columns) != ["t", "i", "j"]:
        raise DataIOError(f"{path}: expected columns t,i,j, got {','.join(frame.columns)}")
    try:
        events = [(t, GroupPair(i, j)) for t, i, j in frame.itertuples(index=False)]
        return EventLog.from_events(int(metadata["K"]), events, float(metadata["horizon"]))
    except (KeyError, ValidationError) as exc:
        raise DataIOError(f"{path}: {exc}") from exc

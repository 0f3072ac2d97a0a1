"""
CSV and JSON exports of fits, trajectories, bias series, bound margins and netsim runs

Undefined numbers are written as empty CSV fields and as null in JSON, never NaN or Inf.
"""
import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import DataIOError
from src.models.group_pair import all_pairs

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _clean(value):
    """Recursively turn numpy values into JSON-safe Python values"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(data, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_clean(data), f, indent=2, allow_nan=False)
            f.write("\n")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    logger.debug("Wrote %s", path)


def read_json(path):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataIOError(f"{path}: invalid JSON: {exc}") from exc


def write_csv(frame, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = frame.replace([np.inf, -np.inf], np.nan)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    logger.debug("Wrote %s (%d rows)", path, len(frame))


def pair_labels(n_groups):
    return [str(pair) for pair in all_pairs(n_groups)]


def fits_document(fits):
    """JSON document of per-window diagonal fits"""
    return {
        "metadata": {"format": "diagonal Hawkes fit", "version": "1.0"},
        "pairs": pair_labels(fits[0].n_groups) if fits else [],
        "windows": [fit.to_dict() for fit in fits],
    }


def write_fits_json(fits, path):
    write_json(fits_document(fits), path)


def regime_table(fits, truth=None):
    """
    One row per window, pair and parameter with the estimate and, if known, the true value

    Args:
        fits: DiagonalFit per window
        truth: Optional list, per window, of (mu, alpha) true vectors

    Returns:
        DataFrame: window_start, window_end, pair, parameter, true, estimate, flag
    """
    rows = []
    for k, fit in enumerate(fits):
        labels = pair_labels(fit.n_groups)
        for p, label in enumerate(labels):
            for name, estimates, true_index in (("alpha", fit.alpha_hat, 1), ("mu", fit.mu_hat, 0)):
                true_value = np.nan if truth is None else truth[k][true_index][p]
                rows.append({
                    "window_start": fit.window[0],
                    "window_end": fit.window[1],
                    "pair": label,
                    "parameter": name,
                    "true": true_value,
                    "estimate": estimates[p],
                    "flag": fit.statuses[p],
                })
    return pd.DataFrame(rows, columns=["window_start", "window_end", "pair", "parameter", "true",
                                       "estimate", "flag"])


def write_regime_csv(fits, path, truth=None):
    write_csv(regime_table(fits, truth), path)


def trajectory_frame(trajectory):
    frame = pd.DataFrame(trajectory.values, columns=[f"lambda_{label}" for label in
                                                      pair_labels(trajectory.params.n_groups)])
    frame.insert(0, "t", trajectory.times)
    return frame


def write_trajectory_csv(trajectory, path):
    write_csv(trajectory_frame(trajectory), path)


def write_stability_json(reports, path, extra=None):
    data = {"metadata": {"format": "stability report", "version": "1.0"},
            "regimes": [report.to_dict() for report in reports]}
    if extra:
        data.update(extra)
    write_json(data, path)


def bias_frame(series):
    return pd.DataFrame({
        "t": series.times,
        "b_emp": series.b_emp,
        "b_inst": series.b_inst,
        "source": series.source,
    })


def write_bias_csv(series, path):
    write_csv(bias_frame(series), path)


def margin_frame(check):
    return pd.DataFrame({
        "t": check.times,
        "interval": check.interval_index,
        "ratio": check.ratio,
        "bound": check.bound,
        "margin": check.margin,
        "passed": check.passed_points,
    })


def write_margin_csv(check, path):
    write_csv(margin_frame(check), path)


def write_edges_csv(graph, path):
    write_csv(pd.DataFrame(graph.edge_table(), columns=["t", "u", "v", "g_u", "g_v"]), path)


def write_audit_csv(audit, path):
    rows = [
        {
            "t": t,
            "u": u,
            "candidates": ";".join(str(v) for v in candidates),
            "scores": ";".join(FLOAT_FORMAT % s for s in scores),
            "accepted": ";".join("1" if ok else "0" for ok in accepted),
        }
        for t, u, candidates, scores, accepted in audit.rows
    ]
    write_csv(pd.DataFrame(rows, columns=["t", "u", "candidates", "scores", "accepted"]), path)


def write_group_matrix_csv(matrix, path, value_name="value"):
    """Long-form K x K group matrix: row group, column group, value"""
    matrix = np.asarray(matrix, dtype=float)
    rows = [{"group_row": a + 1, "group_col": b + 1, value_name: matrix[a, b]}
            for a in range(matrix.shape[0]) for b in range(matrix.shape[1])]
    write_csv(pd.DataFrame(rows), path)

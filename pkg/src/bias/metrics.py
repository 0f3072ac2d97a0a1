import logging

import numpy as np

from src.errors import UndefinedBiasError, ValidationError
from src.estimation.fit import DiagonalFit, tie_within_cross
from src.meanfield.stability import stationary_intensity
from src.models.group_pair import aggregate_within_cross

logger = logging.getLogger(__name__)

SOURCES = ("model-true", "mean-field", "window-estimated", "realised")


class BiasSeries:
    """
    Empirical and instantaneous bias on a time grid

    Undefined values (no events yet, or zero total intensity) are NaN here and become
    empty fields on export.
    """

    def __init__(self, times, b_emp, b_inst=None, source="mean-field"):
        self._times = np.asarray(times, dtype=float)
        self._b_emp = np.asarray(b_emp, dtype=float)
        self._b_inst = np.full(self._times.size, np.nan) if b_inst is None else np.asarray(b_inst, dtype=float)
        if source not in SOURCES:
            raise ValidationError(f"bias source must be one of {SOURCES}, got {source!r}")
        self._source = source
        if self._b_emp.shape != self._times.shape or self._b_inst.shape != self._times.shape:
            raise ValidationError("bias series must have one value per grid time")

    @property
    def times(self):
        return self._times

    @property
    def b_emp(self):
        return self._b_emp

    @property
    def b_inst(self):
        return self._b_inst

    @property
    def source(self):
        return self._source

    def __len__(self):
        return self._times.size


def _ratio(within, cross):
    within = np.asarray(within, dtype=float)
    cross = np.asarray(cross, dtype=float)
    total = within + cross
    out = np.full(np.broadcast(within, cross).shape, np.nan)
    defined = total > 0
    np.divide(within, total, out=out, where=defined)
    return out


def empirical_bias(log, times):
    """
    B_emp(t) = N_w(t) / (N_w(t) + N_c(t)) counting events at s <= t

    Args:
        log: EventLog
        times: Grid times

    Returns:
        ndarray: Values in [0, 1], NaN while no event has happened
    """
    within, cross = log.within_cross_counts(times, inclusive=True)
    return _ratio(within, cross)


def instantaneous_bias(lambda_w, lambda_c):
    """
    B_inst = lambda_w / (lambda_w + lambda_c)

    Raises:
        UndefinedBiasError: Both intensities are zero
    """
    if lambda_w < 0 or lambda_c < 0:
        raise ValidationError("aggregate intensities must be nonnegative")
    total = lambda_w + lambda_c
    if total == 0:
        raise UndefinedBiasError("instantaneous bias is undefined when both intensities are zero")
    return lambda_w / total


def bias_from_intensities(values, n_groups):
    """
    Instantaneous bias of G-vectors of per-pair intensities

    Args:
        values: (..., G) intensities
        n_groups: Group count K

    Returns:
        ndarray: Bias over the leading axes, NaN where the total is zero
    """
    within, cross = aggregate_within_cross(values, n_groups)
    return _ratio(within, cross)


def stationary_bias(model, tie_mu_wc=False):
    """
    B*_inst from the stationary intensity of a fit or of full parameters

    A DiagonalFit uses lambda*_p = mu_p / (1 - alpha_p / beta) pair by pair.

    Args:
        model: DiagonalFit or HawkesParams
        tie_mu_wc: Replace mu by its aggregate within/cross tied version first

    Returns:
        float: Stationary bias

    Raises:
        NonStationaryError: The model has no stationary intensity
        UndefinedBiasError: The stationary intensity is zero everywhere
    """
    if isinstance(model, DiagonalFit):
        mu = model.mu_hat
        if tie_mu_wc:
            mu = tie_within_cross(mu, model.n_groups)
        stationary = mu / (1.0 - model.alpha_hat / model.beta)
    else:
        params = model.with_mu(tie_within_cross(model.mu, model.n_groups)) if tie_mu_wc else model
        stationary = stationary_intensity(params)
    within, cross = aggregate_within_cross(stationary, model.n_groups)
    return instantaneous_bias(float(within), float(cross))


def _bias_or_nan(model, tie_mu_wc):
    try:
        return stationary_bias(model, tie_mu_wc)
    except UndefinedBiasError as exc:
        logger.debug("Bias left undefined: %s", exc)
        return np.nan


def windowed_bias_series(fits, times, tie_mu_wc=False):
    """
    Window-estimated B*_inst as a step function of time

    Every grid time takes the stationary bias of the fit whose window contains it,
    the last window being closed on the right.

    Args:
        fits: DiagonalFit per window, in time order
        times: Grid times

    Returns:
        ndarray: Bias per grid time, NaN outside all windows or where undefined
    """
    times = np.asarray(times, dtype=float)
    out = np.full(times.size, np.nan)
    for k, fit in enumerate(fits):
        start, end = fit.window
        last = k == len(fits) - 1
        inside = (times >= start) & ((times <= end) if last else (times < end))
        out[inside] = _bias_or_nan(fit, tie_mu_wc)
    return out


def demographic_parity_gap(predictions, groups):
    """
    |P(h=1 | same group) - P(h=1 | different groups)| over candidate pairs

    Args:
        predictions: Iterable of ((u, v), h) with h in {0, 1}
        groups: Node -> group mapping (dict or sequence)

    Returns:
        float: Gap in [0, 1]

    Raises:
        UndefinedBiasError: One of the two conditioning sets is empty
    """
    same = [0, 0]
    cross = [0, 0]
    for (u, v), h in predictions:
        bucket = same if groups[u] == groups[v] else cross
        bucket[0] += int(bool(h))
        bucket[1] += 1
    return parity_gap_from_counts(same[0], same[1], cross[0], cross[1])


def parity_gap_from_counts(same_positive, same_total, cross_positive, cross_total):
    """Parity gap from positive and total counts of both conditioning sets"""
    if same_total == 0 or cross_total == 0:
        raise UndefinedBiasError("parity gap needs both same-group and cross-group candidates")
    return abs(same_positive / same_total - cross_positive / cross_total)

import logging

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from src.errors import ValidationError
from src.estimation.likelihood import StreamStatistics
from src.models.group_pair import n_pairs, within_mask
from src.models.hawkes_params import HawkesParams

logger = logging.getLogger(__name__)

ALPHA_EPSILON = 1e-6
MIN_EVENTS = 5
XATOL = 1e-7
MAX_ITER = 200
MU_MODES = ("joint", "count", "fixed")

STATUS_OK = "ok"
STATUS_LOW_DATA = "low-data"
STATUS_NO_CONVERGENCE = "no-convergence"
STATUS_AT_BOUND = "at-bound"
STATUS_ZERO_BASELINE = "zero-baseline"


class DiagonalFit:
    """
    Per-pair maximum-likelihood fit of a diagonal exponential Hawkes model on one window
    """

    def __init__(self, n_groups, mu_hat, alpha_hat, beta, log_likelihood, window, statuses):
        """
        Args:
            n_groups: Group count K
            mu_hat: Baseline estimate per pair
            alpha_hat: Self-excitation estimate per pair (diagonal of A)
            beta: Decay rate used (fixed, not estimated)
            log_likelihood: Per-pair log-likelihood at the estimate, NaN where undefined
            window: (start, end) of the fitted window
            statuses: Per-pair status flag
        """
        self._n_groups = int(n_groups)
        self._mu_hat = np.asarray(mu_hat, dtype=float)
        self._alpha_hat = np.asarray(alpha_hat, dtype=float)
        self._beta = float(beta)
        self._log_likelihood = np.asarray(log_likelihood, dtype=float)
        self._window = (float(window[0]), float(window[1]))
        self._statuses = tuple(statuses)

        if np.any(self._alpha_hat < 0) or np.any(self._alpha_hat >= self._beta):
            raise ValidationError("fitted alpha must satisfy 0 <= alpha < beta")
        if np.any(self._mu_hat < 0):
            raise ValidationError("fitted mu must be nonnegative")

    @property
    def n_groups(self):
        return self._n_groups

    @property
    def mu_hat(self):
        return self._mu_hat

    @property
    def alpha_hat(self):
        return self._alpha_hat

    @property
    def beta(self):
        return self._beta

    @property
    def log_likelihood(self):
        return self._log_likelihood

    @property
    def window(self):
        return self._window

    @property
    def statuses(self):
        return self._statuses

    def flagged(self):
        """Flat indices of pairs whose status is not ok"""
        return [p for p, status in enumerate(self._statuses) if status != STATUS_OK]

    def to_params(self):
        """HawkesParams with A = diag(alpha_hat)"""
        return HawkesParams.diagonal(self._n_groups, self._mu_hat, self._alpha_hat, self._beta)

    def to_dict(self):
        return {
            "K": self._n_groups,
            "window": list(self._window),
            "mu_hat": self._mu_hat.tolist(),
            "alpha_hat": self._alpha_hat.tolist(),
            "beta": self._beta,
            "loglik": [None if not np.isfinite(v) else float(v) for v in self._log_likelihood],
            "flags": list(self._statuses),
        }

    @classmethod
    def from_dict(cls, data):
        loglik = [np.nan if v is None else v for v in data["loglik"]]
        return cls(data["K"], data["mu_hat"], data["alpha_hat"], data["beta"], loglik,
                   data["window"], data["flags"])

    def __repr__(self):
        return (f"DiagonalFit(window={self._window}, mu_hat={np.round(self._mu_hat, 4).tolist()}, "
                f"alpha_hat={np.round(self._alpha_hat, 4).tolist()})")


def _resolve_window(log, window):
    start, end = (0.0, log.horizon) if window is None else (float(window[0]), float(window[1]))
    if end <= start:
        raise ValidationError(f"empty window [{start}, {end})")
    if start < 0 or end > log.horizon:
        raise ValidationError(f"window [{start}, {end}) lies outside [0, {log.horizon})")
    return start, end


def estimate_mu(log, window=None):
    """
    Closed-form baseline estimate N_p / (end - start) per pair

    Args:
        log: EventLog
        window: (start, end), defaults to the whole log

    Returns:
        ndarray: Baseline estimate per pair
    """
    start, end = _resolve_window(log, window)
    return log.counts(start, end) / (end - start)


def tie_within_cross(mu, n_groups):
    """
    Enforce aggregate mu_w = mu_c

    The total baseline is split in half between within pairs and cross pairs, and each
    half is shared equally among its pairs. With a single group everything stays within.
    """
    mu = np.asarray(mu, dtype=float)
    mask = within_mask(n_groups)
    total = mu.sum()
    tied = np.empty_like(mu)
    if not np.any(~mask):
        tied[:] = total / mask.sum()
        return tied
    tied[mask] = total / 2 / mask.sum()
    tied[~mask] = total / 2 / (~mask).sum()
    return tied


def _bounded_maximum(objective, alpha_max):
    """Bounded Brent maximum of a concave function, endpoints included"""
    result = minimize_scalar(
        lambda a: -objective(a),
        bounds=(0.0, alpha_max),
        method="bounded",
        options={"xatol": XATOL, "maxiter": MAX_ITER},
    )
    best = max((float(result.x), 0.0, alpha_max), key=objective)
    return best, bool(result.success)


def _fit_fixed_mu(stats, mu, alpha_max):
    """alpha for a known baseline, Brent then 1-D Newton"""
    if mu <= 0:
        if stats.n_events == 0:
            return 0.0, 0.0, STATUS_OK
        return 0.0, np.nan, STATUS_ZERO_BASELINE

    def objective(a):
        return stats.log_likelihood(mu, a)

    alpha, converged = _bounded_maximum(objective, alpha_max)
    if 0.0 < alpha < alpha_max:
        for _ in range(20):
            grad = stats.gradient(mu, alpha)[1]
            curvature = stats.hessian(mu, alpha)[1, 1]
            if curvature >= 0:
                break
            candidate = min(max(alpha - grad / curvature, 0.0), alpha_max)
            if objective(candidate) < objective(alpha):
                break
            alpha = candidate
            if abs(grad) <= 1e-13 * max(abs(objective(alpha)), 1.0):
                break
    return alpha, objective(alpha), _status(converged, alpha, alpha_max)


def _profile_mu(stats, alpha):
    """Baseline maximising L for a given alpha, root of sum 1/(mu + alpha R_i) = T"""
    n, length = stats.n_events, stats.length
    upper = n / length
    if alpha == 0.0 or not np.any(stats.recursion):
        return upper
    r = stats.recursion

    def score(mu):
        return np.sum(1.0 / (mu + alpha * r)) - length

    if score(upper) >= 0:
        return upper
    lower = min(upper, 1.0 / length) * 1e-3
    return brentq(score, lower, upper, xtol=1e-15, maxiter=MAX_ITER)


def _fit_joint(stats, alpha_max):
    """Joint (mu, alpha) maximum via the profile likelihood and a 2-D Newton polish"""

    def profile(a):
        return stats.log_likelihood(_profile_mu(stats, a), a)

    alpha, converged = _bounded_maximum(profile, alpha_max)
    point = np.array([_profile_mu(stats, alpha), alpha])

    if 0.0 < alpha < alpha_max:
        value = stats.log_likelihood(*point)
        for _ in range(20):
            grad = stats.gradient(*point)
            if np.max(np.abs(grad)) <= 1e-13 * max(abs(value), 1.0):
                break
            try:
                step = np.linalg.solve(stats.hessian(*point), grad)
            except np.linalg.LinAlgError:
                break
            scale = 1.0
            while scale > 1e-6:
                candidate = point - scale * step
                if candidate[0] > 0 and 0.0 <= candidate[1] <= alpha_max:
                    candidate_value = stats.log_likelihood(*candidate)
                    if candidate_value >= value:
                        break
                scale /= 2
            else:
                break
            point, value = candidate, candidate_value

    mu, alpha = float(point[0]), float(point[1])
    value = stats.log_likelihood(mu, alpha)
    if value < stats.poisson_log_likelihood():
        mu, alpha = stats.n_events / stats.length, 0.0
        value = stats.poisson_log_likelihood()
    return mu, alpha, value, _status(converged, alpha, alpha_max)


def _status(converged, alpha, alpha_max):
    if not converged:
        return STATUS_NO_CONVERGENCE
    if alpha >= alpha_max:
        return STATUS_AT_BOUND
    return STATUS_OK


def estimate_alpha_diagonal(log, beta=1.0, window=None, mu_mode="joint", mu=None,
                            tie_mu_wc=False, min_events=MIN_EVENTS):
    """
    Fit mu and the diagonal of A by maximum likelihood, one pair at a time

    Cross-pair excitations are taken as zero, so each mark stream is a univariate
    exponential Hawkes process on the window with history reset at its start.

    Args:
        log: EventLog
        beta: Fixed decay rate
        window: (start, end), defaults to the whole log
        mu_mode: "joint" (mu and alpha together), "count" (mu = N/T) or "fixed" (mu given)
        mu: Baseline vector for mu_mode="fixed"
        tie_mu_wc: Enforce aggregate mu_w = mu_c, then refit alpha with mu held
        min_events: Pairs with fewer events are flagged low-data with alpha = 0

    Returns:
        DiagonalFit: Per-pair estimates and statuses
    """
    if mu_mode not in MU_MODES:
        raise ValidationError(f"mu_mode must be one of {MU_MODES}, got {mu_mode!r}")
    if beta <= 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    start, end = _resolve_window(log, window)
    size = n_pairs(log.n_groups)
    alpha_max = beta * (1.0 - ALPHA_EPSILON)
    streams = [StreamStatistics(log.stream(p, start, end), start, end, beta) for p in range(size)]

    if mu_mode == "fixed":
        if mu is None:
            raise ValidationError("mu_mode='fixed' needs a baseline vector")
        fixed = np.asarray(mu, dtype=float)
        if fixed.shape != (size,) or np.any(fixed < 0):
            raise ValidationError(f"fixed baseline must be a nonnegative vector of length {size}")
    elif mu_mode == "count":
        fixed = np.array([s.n_events / s.length for s in streams])
    else:
        fixed = None

    if tie_mu_wc:
        if fixed is None:
            fixed = np.array([_fit_joint(s, alpha_max)[0] if s.n_events >= min_events
                              else s.n_events / s.length for s in streams])
        fixed = tie_within_cross(fixed, log.n_groups)

    mu_hat = np.zeros(size)
    alpha_hat = np.zeros(size)
    loglik = np.zeros(size)
    statuses = []
    for p, stats in enumerate(streams):
        if stats.n_events < min_events:
            mu_hat[p] = stats.n_events / stats.length if fixed is None else fixed[p]
            loglik[p] = stats.log_likelihood(mu_hat[p], 0.0) if mu_hat[p] > 0 or stats.n_events == 0 else np.nan
            statuses.append(STATUS_LOW_DATA)
            continue
        if fixed is None:
            mu_hat[p], alpha_hat[p], loglik[p], status = _fit_joint(stats, alpha_max)
        else:
            mu_hat[p] = fixed[p]
            alpha_hat[p], loglik[p], status = _fit_fixed_mu(stats, fixed[p], alpha_max)
        statuses.append(status)

    for p, status in enumerate(statuses):
        if status != STATUS_OK:
            logger.warning("Pair %d on window [%g, %g): %s (%d events)", p, start, end, status,
                           streams[p].n_events)
    return DiagonalFit(log.n_groups, mu_hat, alpha_hat, beta, loglik, (start, end), statuses)


def window_edges(breakpoints, horizon):
    """[0] + breakpoints strictly inside (0, horizon) + [horizon]"""
    inner = sorted(float(b) for b in np.asarray(breakpoints, dtype=float).reshape(-1) if 0 < b < horizon)
    if len(set(inner)) != len(inner):
        raise ValidationError("breakpoints must be distinct")
    return [0.0] + inner + [float(horizon)]


def estimate_windowed(log, breakpoints=(), beta=1.0, mu_mode="joint", baseline_window=None,
                      tie_mu_wc=False, min_events=MIN_EVENTS):
    """
    Fit the diagonal model separately on each interval between breakpoints

    Args:
        log: EventLog
        breakpoints: Regime switch times, only those inside (0, horizon) are used
        beta: Fixed decay rate
        mu_mode: As in estimate_alpha_diagonal
        baseline_window: (start, end) whose N/T baseline is held fixed in every window
        tie_mu_wc: Enforce aggregate mu_w = mu_c in every window
        min_events: Low-data threshold

    Returns:
        list: DiagonalFit per window, in time order
    """
    edges = window_edges(breakpoints, log.horizon)
    mu = None
    if baseline_window is not None:
        mu = estimate_mu(log, baseline_window)
        mu_mode = "fixed"
    fits = []
    for start, end in zip(edges[:-1], edges[1:]):
        fits.append(estimate_alpha_diagonal(log, beta=beta, window=(start, end), mu_mode=mu_mode, mu=mu,
                                            tie_mu_wc=tie_mu_wc, min_events=min_events))
    logger.info("Fitted %d windows with mu_mode=%s", len(fits), mu_mode)
    return fits

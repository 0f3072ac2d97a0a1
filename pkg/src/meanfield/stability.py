import logging

import numpy as np
import scipy.linalg

from src.errors import IllConditionedError, NonStationaryError, ValidationError
from src.numerics.linalg import spectral_radius_nonnegative

logger = logging.getLogger(__name__)

CRITICAL_BAND = 1e-9
MAX_CONDITION = 1e12

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


def spectral_radius(A, beta):
    """
    rho(A / beta) for a nonnegative excitation matrix

    Args:
        A: G x G nonnegative matrix
        beta: Decay rate (> 0)

    Returns:
        float: Spectral radius
    """
    if beta <= 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    return spectral_radius_nonnegative(np.asarray(A, dtype=float) / beta)


def classify(rho):
    """Regime name of a spectral radius"""
    if abs(rho - 1.0) <= CRITICAL_BAND:
        return CRITICAL
    return SUBCRITICAL if rho < 1.0 else SUPERCRITICAL


def _solve_stationary(mu, A, beta):
    system = np.eye(A.shape[0]) - A / beta
    condition = np.linalg.cond(system)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise IllConditionedError(condition)
    return scipy.linalg.solve(system, mu)


def stationary_intensity(params, A=None):
    """
    Stationary mean intensity (I - A/beta)^{-1} mu

    Args:
        params: HawkesParams
        A: Optional matrix replacing params.A

    Returns:
        ndarray: lambda* per pair

    Raises:
        NonStationaryError: rho(A/beta) is critical or supercritical
        IllConditionedError: I - A/beta is too ill-conditioned to solve
    """
    A = params.A if A is None else np.asarray(A, dtype=float)
    rho = spectral_radius(A, params.beta)
    regime = classify(rho)
    if regime != SUBCRITICAL:
        raise NonStationaryError(rho, regime)
    return _solve_stationary(params.mu, A, params.beta)


class StabilityReport:
    """
    Spectral diagnostics of one excitation regime

    The stationary intensity and the convergence rate kappa are present exactly when
    the regime is subcritical.
    """

    def __init__(self, spectral_radius, regime, beta, stationary=None, interval=None):
        self._spectral_radius = float(spectral_radius)
        self._regime = regime
        self._beta = float(beta)
        self._stationary = None if stationary is None else np.asarray(stationary, dtype=float)
        self._interval = interval
        if (self._stationary is not None) != (regime == SUBCRITICAL):
            raise ValidationError("a stationary intensity exists exactly in the subcritical regime")

    @property
    def spectral_radius(self):
        return self._spectral_radius

    @property
    def regime(self):
        return self._regime

    @property
    def beta(self):
        return self._beta

    @property
    def stationary(self):
        return self._stationary

    @property
    def interval(self):
        return self._interval

    @property
    def kappa_bound(self):
        """beta (1 - rho), only for subcritical regimes"""
        if self._regime != SUBCRITICAL:
            return None
        return self._beta * (1.0 - self._spectral_radius)

    def is_subcritical(self):
        return self._regime == SUBCRITICAL

    def to_dict(self):
        return {
            "interval": None if self._interval is None else list(self._interval),
            "spectral_radius": self._spectral_radius,
            "regime": self._regime,
            "kappa_bound": self.kappa_bound,
            "stationary": None if self._stationary is None else self._stationary.tolist(),
        }

    def __repr__(self):
        return f"StabilityReport(rho={self._spectral_radius:.6g}, regime={self._regime})"


def analyze_stability(params, A=None, interval=None):
    """
    Stability report for params (or params with A replaced)

    Non-stationary regimes are a detection outcome here: they are logged and reported,
    not raised.
    """
    A = params.A if A is None else np.asarray(A, dtype=float)
    rho = spectral_radius(A, params.beta)
    regime = classify(rho)
    stationary = None
    if regime == SUBCRITICAL:
        stationary = _solve_stationary(params.mu, A, params.beta)
    else:
        logger.warning("No stationary intensity: rho(A/beta) = %.6g (%s)", rho, regime)
    return StabilityReport(rho, regime, params.beta, stationary, interval)


def analyze_schedule(params, schedule):
    """One StabilityReport per regime of a schedule, with its interval attached"""
    return [
        analyze_stability(params, A, interval)
        for A, interval in zip(schedule.matrices, schedule.intervals())
    ]

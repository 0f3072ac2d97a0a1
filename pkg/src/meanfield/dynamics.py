import logging
import math

import numpy as np

from src.errors import NonStationaryError, ValidationError
from src.hawkes.intensity import REGIME_MODES
from src.meanfield.stability import analyze_stability
from src.numerics.ode import rk4_linear_map

logger = logging.getLogger(__name__)


def default_step(beta):
    """min(0.01, 0.1 / beta)"""
    return min(0.01, 0.1 / beta)


def _segments(params, schedule, horizon):
    """(start, end, A) pieces of [0, horizon) on which the excitation matrix is constant"""
    if horizon is None or not np.isfinite(horizon) or horizon <= 0:
        raise ValidationError(f"horizon must be > 0, got {horizon}")
    if schedule is None:
        return [(0.0, float(horizon), params.A)]
    schedule.check_horizon(horizon)
    inner = [float(b) for b in schedule.breakpoints[1:] if b < horizon]
    edges = [0.0] + inner + [float(horizon)]
    return [(a, b, schedule.matrix_at(a)) for a, b in zip(edges[:-1], edges[1:])]


class MeanFieldTrajectory:
    """
    Deterministic mean intensity lambda_bar(t) sampled on a grid

    Grid points include every regime breakpoint. The value stored at a breakpoint is
    the one that starts the new regime. Once the state leaves the floating-point range
    every later value is NaN and overflow_time records the first such grid time.
    """

    def __init__(self, times, values, params, schedule=None, segments=None, regime_mode="freeze"):
        self._times = np.asarray(times, dtype=float)
        self._values = np.array(values, dtype=float)
        self._params = params
        self._schedule = schedule
        self._segments = segments if segments is not None else _segments(params, schedule, self._times[-1])
        self._regime_mode = regime_mode
        if self._values.shape != (self._times.size, params.n_pairs):
            raise ValidationError("trajectory values must be (len(times), G)")
        if np.any(np.diff(self._times) <= 0):
            raise ValidationError("trajectory times must be strictly increasing")
        broken = ~np.all(np.isfinite(self._values), axis=1)
        self._overflow_time = None
        if broken.any():
            first = int(np.argmax(broken))
            self._values[first:] = np.nan
            self._overflow_time = float(self._times[first])

    @property
    def times(self):
        return self._times

    @property
    def values(self):
        return self._values

    @property
    def params(self):
        return self._params

    @property
    def schedule(self):
        return self._schedule

    @property
    def segments(self):
        return list(self._segments)

    @property
    def regime_mode(self):
        return self._regime_mode

    @property
    def overflow_time(self):
        """First grid time with a non-finite intensity, None if the path stays finite"""
        return self._overflow_time

    @property
    def final(self):
        return self._values[-1]

    def value_at(self, t):
        """Linear interpolation of every pair's intensity at time t"""
        return np.array([np.interp(t, self._times, column) for column in self._values.T])

    def __len__(self):
        return self._times.size


def integrate_meanfield(params, schedule=None, horizon=None, step=None, regime_mode="freeze"):
    """
    Integrate the mean-field ODE d/dt lambda_bar = (A - beta I) lambda_bar + beta mu

    Fixed-step classical RK4 from lambda_bar(0) = mu. Each constant-A interval is
    split into ceil(length / step) equal steps so that breakpoints fall on the grid.
    In "freeze" mode the state carries over unchanged at a switch. In "reweight" mode
    the decayed excitation y (lambda_bar = mu + A y) carries over and lambda_bar jumps.

    Args:
        params: HawkesParams
        schedule: Optional RegimeSchedule
        horizon: End time
        step: Target step size, default min(0.01, 0.1 / beta)
        regime_mode: "freeze" or "reweight"

    Returns:
        MeanFieldTrajectory: Sampled trajectory
    """
    if regime_mode not in REGIME_MODES:
        raise ValidationError(f"regime_mode must be one of {REGIME_MODES}, got {regime_mode!r}")
    segments = _segments(params, schedule, horizon)
    step = default_step(params.beta) if step is None else float(step)
    if step <= 0:
        raise ValidationError(f"step must be > 0, got {step}")
    smallest = min(end - start for start, end, _ in segments)
    if step >= smallest:
        raise ValidationError(f"step {step} must be smaller than the shortest interval {smallest}")

    beta, mu = params.beta, params.mu
    identity = np.eye(params.n_pairs)
    times = [0.0]
    values = [mu.copy()]
    state = mu.copy() if regime_mode == "freeze" else np.zeros(params.n_pairs)

    overflowed = False
    for start, end, A in segments:
        n_steps = max(1, math.ceil((end - start) / step - 1e-9))
        h = (end - start) / n_steps
        if regime_mode == "freeze":
            P, q = rk4_linear_map(A - beta * identity, beta * mu, h)
        else:
            P, q = rk4_linear_map(A - beta * identity, mu, h)
            if not overflowed:
                values[-1] = mu + A @ state
        block = np.full((n_steps, params.n_pairs), np.nan)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(0 if overflowed else n_steps):
                state = P @ state + q
                if not np.all(np.isfinite(state)):
                    overflowed = True
                    break
                block[k] = state if regime_mode == "freeze" else mu + A @ state
        grid = start + h * np.arange(1, n_steps + 1)
        grid[-1] = end
        times.extend(grid)
        values.extend(block)

    times = np.asarray(times)
    times[-1] = float(horizon)
    trajectory = MeanFieldTrajectory(times, np.asarray(values), params, schedule, segments, regime_mode)
    if trajectory.overflow_time is not None:
        logger.warning("Mean field left the floating-point range at t = %g", trajectory.overflow_time)
    logger.debug("Integrated mean field on %d grid points", times.size)
    return trajectory


def integrate_meanfield_quadrature(params, schedule=None, horizon=None, step=None):
    """
    Solve the mean-field integral equation by trapezoidal quadrature

    lambda_bar(t) = mu + int_0^t exp(-beta (t - s)) A(s) lambda_bar(s) ds, with the
    convolution carried by an exponential running sum and the implicit trapezoid
    solved exactly at every step.

    Args:
        params: HawkesParams
        schedule: Optional RegimeSchedule
        horizon: End time
        step: Target step size

    Returns:
        MeanFieldTrajectory: Sampled trajectory on the quadrature grid
    """
    segments = _segments(params, schedule, horizon)
    step = default_step(params.beta) / 10 if step is None else float(step)
    if step <= 0 or step >= min(end - start for start, end, _ in segments):
        raise ValidationError(f"invalid quadrature step {step}")

    beta, mu = params.beta, params.mu
    identity = np.eye(params.n_pairs)
    times = [0.0]
    values = [mu.copy()]
    current = mu.copy()
    running = np.zeros(params.n_pairs)

    overflowed = False
    for start, end, A in segments:
        n_steps = max(1, math.ceil((end - start) / step - 1e-9))
        h = (end - start) / n_steps
        decay = math.exp(-beta * h)
        solver = np.linalg.inv(identity - h / 2 * A)
        block = np.full((n_steps, params.n_pairs), np.nan)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(0 if overflowed else n_steps):
                carried = decay * running + h / 2 * decay * (A @ current)
                current = solver @ (mu + carried)
                running = carried + h / 2 * (A @ current)
                if not np.all(np.isfinite(current)):
                    overflowed = True
                    break
                block[k] = current
        values.extend(block)
        grid = start + h * np.arange(1, n_steps + 1)
        grid[-1] = end
        times.extend(grid)

    times = np.asarray(times)
    times[-1] = float(horizon)
    trajectory = MeanFieldTrajectory(times, np.asarray(values), params, schedule, segments)
    if trajectory.overflow_time is not None:
        logger.warning("Quadrature left the floating-point range at t = %g", trajectory.overflow_time)
    return trajectory


class ConvergenceCheck:
    """
    Outcome of the exponential convergence-bound check on a trajectory

    ratio is ||lambda_bar(t) - lambda*_k|| / ||lambda_bar(tau_k) - lambda*_k||, NaN on
    intervals that start at their equilibrium. bound is exp(-kappa_k (t - tau_k)).
    """

    def __init__(self, times, interval_index, ratio, bound, passed_points, kappas, empirical_c):
        self._times = times
        self._interval_index = interval_index
        self._ratio = ratio
        self._bound = bound
        self._passed_points = passed_points
        self._kappas = kappas
        self._empirical_c = empirical_c

    @property
    def passed(self):
        return bool(np.all(self._passed_points))

    @property
    def times(self):
        return self._times

    @property
    def interval_index(self):
        return self._interval_index

    @property
    def ratio(self):
        return self._ratio

    @property
    def bound(self):
        return self._bound

    @property
    def margin(self):
        """bound - ratio, positive where the bound holds"""
        return self._bound - self._ratio

    @property
    def passed_points(self):
        return self._passed_points

    @property
    def kappas(self):
        return self._kappas

    @property
    def empirical_c(self):
        """Smallest C with ratio <= C exp(-kappa_k (t - tau_k)) on each interval"""
        return self._empirical_c

    def failing_intervals(self):
        return sorted(set(self._interval_index[~self._passed_points].tolist()))


def verify_convergence_bound(trajectory, reports=None, safety=0.9, atol=1e-10):
    """
    Check the normalized distance to each local equilibrium against exp(-kappa_k (t - tau_k))

    kappa_k = safety * beta * (1 - rho_k). A grid point also passes when its distance
    to the equilibrium is at most atol.

    Args:
        trajectory: MeanFieldTrajectory
        reports: Optional StabilityReport per interval (the last one is reused for a tail
            interval past the schedule end); computed from the trajectory when omitted
        safety: Factor in (0, 1)
        atol: Absolute distance floor

    Returns:
        ConvergenceCheck: Pointwise margins and the overall verdict

    Raises:
        NonStationaryError: Some interval is not subcritical
    """
    if not 0.0 < safety < 1.0:
        raise ValidationError(f"safety must lie in (0, 1), got {safety}")
    params = trajectory.params
    segments = trajectory.segments
    if reports is None:
        reports = [analyze_stability(params, A, (start, end)) for start, end, A in segments]
    if len(reports) == 0:
        raise ValidationError("at least one stability report is needed")

    times, values = trajectory.times, trajectory.values
    index = np.zeros(times.size, dtype=np.int64)
    ratio = np.full(times.size, np.nan)
    bound = np.ones(times.size)
    passed = np.ones(times.size, dtype=bool)
    kappas, empirical_c = [], []

    for k, (start, end, _) in enumerate(segments):
        report = reports[min(k, len(reports) - 1)]
        if not report.is_subcritical():
            raise NonStationaryError(report.spectral_radius, report.regime)
        kappa = safety * report.kappa_bound
        kappas.append(kappa)

        last = k == len(segments) - 1
        rows = np.where((times >= start) & ((times <= end) if last else (times < end)))[0]
        index[rows] = k
        distance = np.linalg.norm(values[rows] - report.stationary, axis=1)
        initial = distance[0]
        bound[rows] = np.exp(-kappa * (times[rows] - start))
        if initial <= atol:
            empirical_c.append(np.nan)
            continue
        ratio[rows] = distance / initial
        passed[rows] = (ratio[rows] <= bound[rows] * (1 + 1e-12)) | (distance <= atol)
        resolved = distance > atol
        empirical_c.append(float(np.max(ratio[rows][resolved] / bound[rows][resolved], initial=1.0)))

    check = ConvergenceCheck(times, index, ratio, bound, passed, np.array(kappas), np.array(empirical_c))
    if not check.passed:
        logger.warning("Convergence bound violated on intervals %s (empirical C = %s)",
                       check.failing_intervals(), np.round(check.empirical_c, 4).tolist())
    return check

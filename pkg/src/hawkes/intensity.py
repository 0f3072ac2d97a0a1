import numpy as np

from src.errors import ValidationError

REGIME_MODES = ("reweight", "freeze")


def _check_mode(regime_mode):
    if regime_mode not in REGIME_MODES:
        raise ValidationError(f"regime_mode must be one of {REGIME_MODES}, got {regime_mode!r}")


def _matrix_at(params, schedule, t):
    return params.A if schedule is None else schedule.matrix_at(t)


class ExcitationState:
    """
    Running exponential-kernel state of a group-pair Hawkes process

    In "reweight" mode the state is the per-source decayed count R and the intensity
    is mu + A(t) R, so a regime switch rescales the influence of past events.
    In "freeze" mode each event adds the column of the matrix in force at its own
    time, and later switches only affect later events.
    """

    def __init__(self, params, schedule=None, regime_mode="reweight"):
        _check_mode(regime_mode)
        if schedule is not None and schedule.dimension != params.n_pairs:
            raise ValidationError(
                f"schedule matrices are {schedule.dimension}x{schedule.dimension}, "
                f"expected {params.n_pairs}x{params.n_pairs}"
            )
        self._params = params
        self._schedule = schedule
        self._mode = regime_mode
        self._state = np.zeros(params.n_pairs)
        self._time = 0.0
        self._matrix = _matrix_at(params, schedule, 0.0)

    @property
    def time(self):
        return self._time

    def advance(self, t):
        """Decay the state from the current time to t"""
        if t < self._time:
            raise ValidationError(f"cannot move the excitation state back from {self._time} to {t}")
        self._state *= np.exp(-self._params.beta * (t - self._time))
        self._time = t
        if self._schedule is not None:
            self._matrix = self._schedule.matrix_at(t)

    def add_event(self, mark):
        """Register an event of the given flat mark at the current time"""
        if self._mode == "reweight":
            self._state[mark] += 1.0
        else:
            self._state += self._matrix[:, mark]

    def intensity(self):
        """Conditional intensity vector at the current time"""
        if self._mode == "reweight":
            return self._params.mu + self._matrix @ self._state
        return self._params.mu + self._state


def intensity_at(params, log, t, schedule=None, regime_mode="reweight"):
    """
    Conditional intensity of every group pair at time t

    Only events strictly before t contribute.

    Args:
        params: HawkesParams
        log: EventLog
        t: Query time (>= 0)
        schedule: Optional RegimeSchedule replacing params.A per interval
        regime_mode: "reweight" or "freeze"

    Returns:
        ndarray: Intensity vector of length G
    """
    _check_mode(regime_mode)
    if t < 0:
        raise ValidationError(f"query time must be >= 0, got {t}")
    past = log.times < t
    times, marks = log.times[past], log.marks[past]
    if times.size == 0:
        return params.mu.copy()

    weights = np.exp(-params.beta * (t - times))
    size = params.n_pairs
    if regime_mode == "reweight" or schedule is None:
        decayed = np.bincount(marks, weights=weights, minlength=size)
        return params.mu + _matrix_at(params, schedule, t) @ decayed

    # Freeze: each event is weighted by the matrix in force when it happened
    excitation = np.zeros(size)
    regimes = np.array([schedule.regime_index(s) for s in times])
    for k in np.unique(regimes):
        in_regime = regimes == k
        decayed = np.bincount(marks[in_regime], weights=weights[in_regime], minlength=size)
        excitation += schedule.matrices[k] @ decayed
    return params.mu + excitation


def intensity_path(params, log, grid, schedule=None, regime_mode="reweight"):
    """
    Realised conditional intensity on a grid using the running-state recursion

    Args:
        params: HawkesParams
        log: EventLog
        grid: Nondecreasing query times
        schedule: Optional RegimeSchedule
        regime_mode: "reweight" or "freeze"

    Returns:
        ndarray: (len(grid), G) intensities, left limits at event times
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid[0] < 0 or np.any(np.diff(grid) < 0)):
        raise ValidationError("grid must be nonnegative and nondecreasing")
    state = ExcitationState(params, schedule, regime_mode)
    out = np.empty((grid.size, params.n_pairs))
    times, marks = log.times, log.marks
    cursor = 0
    for row, t in enumerate(grid):
        while cursor < times.size and times[cursor] < t:
            state.advance(times[cursor])
            state.add_event(marks[cursor])
            cursor += 1
        state.advance(t)
        out[row] = state.intensity()
    return out

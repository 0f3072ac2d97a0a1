import logging

import numpy as np

from src.errors import ValidationError
from src.hawkes.intensity import ExcitationState
from src.models.event_log import EventLog

logger = logging.getLogger(__name__)


def make_rng(seed):
    """Counter-based generator used for every random draw in the package"""
    return np.random.Generator(np.random.Philox(seed))


def simulate(params, schedule=None, horizon=None, seed=0, regime_mode="reweight"):
    """
    Simulate the group-pair Hawkes process on [0, horizon) by Ogata thinning

    The dominating rate is the total intensity at the current point (just after the
    last accepted event, a rejected candidate or a regime breakpoint). Kernels only
    decay between events, so it bounds the intensity until the next breakpoint.

    Args:
        params: HawkesParams
        schedule: Optional RegimeSchedule replacing params.A per interval
        horizon: Observation end time (> 0)
        seed: Integer seed or numpy SeedSequence
        regime_mode: "reweight" or "freeze"

    Returns:
        EventLog: Simulated events
    """
    if horizon is None or not np.isfinite(horizon) or horizon <= 0:
        raise ValidationError(f"horizon must be > 0, got {horizon}")
    horizon = float(horizon)
    boundaries = [horizon]
    if schedule is not None:
        schedule.check_horizon(horizon)
        boundaries = sorted(set(float(b) for b in schedule.breakpoints[1:] if b < horizon) | {horizon})

    rng = make_rng(seed)
    state = ExcitationState(params, schedule, regime_mode)
    times, marks = [], []
    t = 0.0
    next_boundary = 0

    while True:
        while boundaries[next_boundary] <= t:
            next_boundary += 1
            if next_boundary == len(boundaries):
                break
        if next_boundary == len(boundaries):
            break
        boundary = boundaries[next_boundary]

        bound = state.intensity().sum()
        candidate = boundary if bound <= 0 else t + rng.exponential(1.0 / bound)
        if candidate >= boundary:
            # Refresh the dominating rate where A may jump
            t = boundary
            if t >= horizon:
                break
            state.advance(t)
            continue

        candidate = max(candidate, np.nextafter(t, np.inf))
        state.advance(candidate)
        t = candidate
        lam = state.intensity()
        threshold = rng.uniform() * bound
        if threshold <= lam.sum():
            mark = min(int(np.searchsorted(np.cumsum(lam), threshold, side="right")), lam.size - 1)
            times.append(t)
            marks.append(mark)
            state.add_event(mark)

    logger.info("Simulated %d events on [0, %g)", len(times), horizon)
    return EventLog(params.n_groups, times, marks, horizon)

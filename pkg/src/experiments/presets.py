"""
Parameter sets of the worked examples: the two-group model, the three-regime
two-stream simulation, the three-interval stability schedule and a non-normal schedule
"""
import numpy as np

from src.models.hawkes_params import HawkesParams
from src.models.regime_schedule import RegimeSchedule

# Two-group model, pairs ordered (1,1), (2,2), (1,2)
TWO_GROUP_MU = (0.8, 0.5, 0.2)
TWO_GROUP_ENTRIES = {
    ((1, 1), (1, 1)): 0.60,
    ((2, 2), (2, 2)): 0.40,
    ((1, 2), (1, 2)): 0.20,
    ((1, 2), (1, 1)): 0.10,
    ((1, 2), (2, 2)): 0.10,
    ((1, 1), (1, 2)): 0.05,
    ((2, 2), (1, 2)): 0.05,
}
FAIRNESS_CROSS_EXCITATION = 0.90

# Three regimes of two independent streams: w = pair (1,1), c = pair (1,2)
REGIME_BREAKPOINTS = (0.0, 500.0, 1000.0, 1500.0)
REGIME_ALPHA_W = (0.40, 0.75, 0.50)
REGIME_ALPHA_C = (0.20, 0.15, 0.50)
REGIME_MU_W = 0.8
REGIME_MU_C = 0.6

# Symmetric matrices of the three-interval stability schedule
STABILITY_BREAKPOINTS = (0.0, 60.0, 120.0, 180.0)
STABILITY_MATRICES = (
    ((0.40, 0.00, 0.05), (0.00, 0.30, 0.05), (0.05, 0.05, 0.20)),
    ((0.70, 0.00, 0.02), (0.00, 0.60, 0.02), (0.02, 0.02, 0.10)),
    ((0.30, 0.00, 0.10), (0.00, 0.30, 0.10), (0.10, 0.10, 0.50)),
)


def two_group_params(beta=1.0):
    """Standard two-group model"""
    return HawkesParams.from_entries(2, TWO_GROUP_MU, TWO_GROUP_ENTRIES, beta)


def fairness_aware_params(beta=1.0):
    """Two-group model with boosted cross-group self-excitation"""
    entries = dict(TWO_GROUP_ENTRIES)
    entries[((1, 2), (1, 2))] = FAIRNESS_CROSS_EXCITATION
    return HawkesParams.from_entries(2, TWO_GROUP_MU, entries, beta)


def regime_schedule():
    """Three-regime schedule of the two-stream simulation"""
    matrices = [np.diag([aw, 0.0, ac]) for aw, ac in zip(REGIME_ALPHA_W, REGIME_ALPHA_C)]
    return RegimeSchedule(REGIME_BREAKPOINTS, matrices)


def regime_params(beta=1.0):
    """Baselines of the two-stream simulation, pair (2,2) silent"""
    schedule = regime_schedule()
    return HawkesParams(2, (REGIME_MU_W, 0.0, REGIME_MU_C), schedule.matrices[0], beta)


def regime_truth():
    """True (mu, alpha) vectors per regime window"""
    mu = np.array([REGIME_MU_W, 0.0, REGIME_MU_C])
    return [(mu, np.array([aw, 0.0, ac])) for aw, ac in zip(REGIME_ALPHA_W, REGIME_ALPHA_C)]


def stability_schedule():
    return RegimeSchedule(STABILITY_BREAKPOINTS, STABILITY_MATRICES)


def stability_params(beta=1.0):
    return HawkesParams(2, TWO_GROUP_MU, STABILITY_MATRICES[0], beta)


def non_normal_schedule():
    """
    Diagonal regime followed by a nilpotent one

    After the switch the error e' = (A - I) e shears (1,2)-error into (1,1), so the
    normalized distance overshoots exp(-0.9 t) for a while.
    """
    first = np.diag([0.0, 0.5, 0.0])
    second = np.zeros((3, 3))
    second[0, 1] = 5.0
    return RegimeSchedule([0.0, 40.0, 50.0], [first, second])


def non_normal_params():
    return HawkesParams(2, (1.0, 1.0, 1.0), non_normal_schedule().matrices[0], 1.0)

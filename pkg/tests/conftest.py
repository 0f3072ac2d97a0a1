import numpy as np
import pytest

from src.experiments.presets import two_group_params
from src.models.event_log import EventLog
from src.models.hawkes_params import HawkesParams
from src.models.sim_config import SimConfig


@pytest.fixture
def two_group():
    return two_group_params()


@pytest.fixture
def poisson_params():
    """Two groups, no excitation"""
    return HawkesParams(2, [0.5, 0.3, 0.2], np.zeros((3, 3)), 1.0)


@pytest.fixture
def small_log():
    return EventLog.from_events(2, [(0.5, (1, 1)), (1.0, (1, 2)), (1.5, (2, 2)), (2.5, (1, 1))], 4.0)


@pytest.fixture
def small_sim_config():
    return SimConfig(n_nodes=60, n_groups=3, horizon_pre=30, horizon_lp=40, activity_rate=0.2,
                     embedding_dim=4, seed=3)


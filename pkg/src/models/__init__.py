"""
Domain types for group-pair Hawkes processes and the temporal network simulator
"""

# Import model classes for easy access
from src.models.group_pair import GroupPair, all_pairs, n_pairs, pair_index, within_mask
from src.models.hawkes_params import HawkesParams, neighbourhood_mask
from src.models.event_log import EventLog
from src.models.regime_schedule import RegimeSchedule
from src.models.sim_config import SimConfig
from src.models.temporal_graph import TemporalGraph

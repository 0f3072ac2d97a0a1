"""
Intensity evaluation and exact simulation of group-pair Hawkes processes
"""

from src.hawkes.intensity import ExcitationState, intensity_at, intensity_path
from src.hawkes.simulation import make_rng, simulate

"""
Empirical, instantaneous and stationary bias measures and the demographic parity gap
"""

from src.bias.metrics import (
    BiasSeries,
    bias_from_intensities,
    demographic_parity_gap,
    empirical_bias,
    instantaneous_bias,
    parity_gap_from_counts,
    stationary_bias,
    windowed_bias_series,
)

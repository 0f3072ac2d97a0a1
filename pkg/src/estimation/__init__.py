"""
Maximum-likelihood estimation of diagonal exponential Hawkes models
"""

from src.estimation.likelihood import StreamStatistics, recursion_terms
from src.estimation.fit import (
    DiagonalFit,
    estimate_alpha_diagonal,
    estimate_mu,
    estimate_windowed,
    tie_within_cross,
    window_edges,
)

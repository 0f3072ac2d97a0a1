"""
Small dense numerical helpers shared by the simulation and analysis layers
"""

from src.numerics.linalg import (
    cosine_similarity,
    normalize,
    normalize_rows,
    softmax,
    spectral_radius_nonnegative,
)
from src.numerics.ode import rk4_linear_map

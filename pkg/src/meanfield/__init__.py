"""
Mean-field dynamics, stationary intensities and stability diagnostics
"""

from src.meanfield.stability import (
    StabilityReport,
    analyze_schedule,
    analyze_stability,
    classify,
    spectral_radius,
    stationary_intensity,
)
from src.meanfield.dynamics import (
    ConvergenceCheck,
    MeanFieldTrajectory,
    default_step,
    integrate_meanfield,
    integrate_meanfield_quadrature,
    verify_convergence_bound,
)

"""
Preset setups and the reproduction pipelines behind the figure and table data
"""

from src.experiments.convergence import check_setup, run_convergence
from src.experiments.policy_comparison import NetsimRun, analyze_log, run_policy, run_policy_comparison
from src.experiments.regimes import run_regimes
from src.experiments.two_group import run_two_group

REPRODUCTIONS = {
    "two-group": run_two_group,
    "regimes": run_regimes,
    "convergence": run_convergence,
}

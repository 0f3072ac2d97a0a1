"""
Recommender feedback runs and the policy comparison
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.bias.metrics import empirical_bias, stationary_bias
from src.errors import UndefinedBiasError, ValidationError
from src.estimation.fit import estimate_windowed
from src.models.group_pair import to_group_matrix, within_mask
from src.netsim.policies import get_policy
from src.netsim.simulator import generate_pre_network, phase_seeds, run_lp_phase
from src.storage.exports import write_csv

logger = logging.getLogger(__name__)

COMPARED_POLICIES = ("homophily-boost", "group-blind-random", "cross-boost")
RETRAIN_POLICY = "homophily-boost"
DEFAULT_RETRAIN_PERIOD = 50


@dataclass
class NetsimRun:
    policy: str
    config: object
    graph: object
    log: object
    audit: object
    fits: list
    stationary_bias: float
    parity_gap: float

    @property
    def lp_fit(self):
        return self.fits[-1]

    @property
    def alpha_matrix(self):
        """Fitted recommender-phase self-excitation as a K x K group matrix"""
        return to_group_matrix(self.lp_fit.alpha_hat, self.config.n_groups)

    @property
    def mu_matrix(self):
        return to_group_matrix(self.lp_fit.mu_hat, self.config.n_groups)

    def summary(self):
        mask = within_mask(self.config.n_groups)
        alpha = self.lp_fit.alpha_hat
        final_b_emp = empirical_bias(self.log, [self.log.horizon])[0]
        return {
            "policy": self.policy,
            "seed": self.config.seed,
            "retrain_period": self.config.retrain_period,
            "n_edges": self.graph.n_edges,
            "stationary_bias": self.stationary_bias,
            "parity_gap": self.parity_gap,
            "b_emp_final": final_b_emp,
            "alpha_within": float(alpha[mask].mean()),
            "alpha_cross": float(alpha[~mask].mean()) if np.any(~mask) else np.nan,
        }


def _or_nan(compute, *args):
    try:
        return compute(*args)
    except UndefinedBiasError as exc:
        logger.warning("%s", exc)
        return np.nan


def analyze_log(log, config):
    """
    Diagonal fits of a netsim log: baselines from the pre-network, excitation per phase

    Returns:
        list: DiagonalFit for the pre-network window and the recommender window
    """
    if config.horizon_pre <= 0 or config.horizon_lp <= 0:
        raise ValidationError("both phases are needed to separate baselines from excitation")
    return estimate_windowed(log, [config.horizon_pre], beta=config.beta,
                             baseline_window=(0.0, float(config.horizon_pre)))


def run_policy(config, policy_name):
    """
    Pre-network, recommender phase under one policy and its bias analysis

    Args:
        config: SimConfig
        policy_name: Built-in policy name

    Returns:
        NetsimRun: Graph, event log, audit, fits and summary measures
    """
    policy = get_policy(policy_name, config, seed=phase_seeds(config.seed)[2])
    graph, _ = generate_pre_network(config)
    graph, log, audit = run_lp_phase(graph, policy, config)
    fits = analyze_log(log, config)
    b_star = _or_nan(stationary_bias, fits[-1])
    gap = _or_nan(audit.parity_gap)
    logger.info("Policy %s (seed %d): B* = %.4f, parity gap = %.5f", policy_name, config.seed, b_star, gap)
    return NetsimRun(policy_name, config, graph, log, audit, fits, b_star, gap)


def _summary_row(config, policy_name):
    return run_policy(config, policy_name).summary()


def comparison_tasks(config, seeds, policies=COMPARED_POLICIES, retrain_period=DEFAULT_RETRAIN_PERIOD):
    """(config, policy) pairs: every policy without retraining plus the retrained boost policy"""
    tasks = []
    for seed in seeds:
        base = config.copy_with(seed=int(seed), retrain_period=0)
        tasks.extend((base, name) for name in policies)
        if retrain_period > 0:
            tasks.append((base.copy_with(retrain_period=retrain_period), RETRAIN_POLICY))
    return tasks


def run_policy_comparison(config, seeds=range(10), policies=COMPARED_POLICIES,
                          retrain_period=DEFAULT_RETRAIN_PERIOD, jobs=1, out_dir=None):
    """
    Seed-averaged stationary bias, parity gap and fitted excitation per policy

    Args:
        config: Base SimConfig, its seed and retrain period are overridden per run
        seeds: Run seeds
        policies: Policies compared without retraining
        retrain_period: Period of the additional retrained run, 0 to skip it
        jobs: Worker processes
        out_dir: Directory for runs.csv and summary.csv, or None

    Returns:
        tuple: (per-run DataFrame, per-policy mean DataFrame)
    """
    tasks = comparison_tasks(config, seeds, policies, retrain_period)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_summary_row, *zip(*tasks)))
    else:
        rows = [_summary_row(cfg, name) for cfg, name in tasks]
    runs = pd.DataFrame(rows)
    summary = (runs.drop(columns=["seed"])
               .groupby(["policy", "retrain_period"], sort=False)
               .mean()
               .reset_index())
    if out_dir is not None:
        out_dir = Path(out_dir)
        write_csv(runs, out_dir / "runs.csv")
        write_csv(summary, out_dir / "summary.csv")
    return runs, summary

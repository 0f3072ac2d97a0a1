"""
Convergence of the mean field towards each local equilibrium of a switching schedule
"""
import logging
from pathlib import Path

from src.experiments.presets import (
    non_normal_params,
    non_normal_schedule,
    stability_params,
    stability_schedule,
)
from src.meanfield.dynamics import integrate_meanfield, verify_convergence_bound
from src.meanfield.stability import analyze_schedule
from src.storage.exports import write_margin_csv, write_stability_json, write_trajectory_csv

logger = logging.getLogger(__name__)

SETUPS = {
    "three-interval": (stability_params, stability_schedule),
    "non-normal": (non_normal_params, non_normal_schedule),
}


def check_setup(name, safety=0.9, step=None):
    """
    Integrate a preset schedule in freeze mode and check the exponential bound

    Returns:
        tuple: (reports, trajectory, ConvergenceCheck)
    """
    build_params, build_schedule = SETUPS[name]
    params, schedule = build_params(), build_schedule()
    reports = analyze_schedule(params, schedule)
    trajectory = integrate_meanfield(params, schedule, schedule.end, step=step, regime_mode="freeze")
    check = verify_convergence_bound(trajectory, reports, safety=safety)
    logger.info("Setup %s: bound %s, empirical C = %s", name, "holds" if check.passed else "violated",
                check.empirical_c.tolist())
    return reports, trajectory, check


def run_convergence(out_dir=None, safety=0.9, step=None):
    """
    Both preset schedules, with stability reports, trajectories and pointwise margins

    Returns:
        dict: setup name -> (reports, trajectory, ConvergenceCheck)
    """
    results = {name: check_setup(name, safety, step) for name in SETUPS}
    if out_dir is not None:
        out_dir = Path(out_dir)
        for name, (reports, trajectory, check) in results.items():
            write_stability_json(reports, out_dir / f"stability_{name}.json", extra={
                "safety": safety,
                "passed": check.passed,
                "empirical_c": check.empirical_c.tolist(),
                "failing_intervals": check.failing_intervals(),
            })
            write_trajectory_csv(trajectory, out_dir / f"trajectory_{name}.csv")
            write_margin_csv(check, out_dir / f"margins_{name}.csv")
    return results

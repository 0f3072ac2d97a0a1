"""
Command-line front end: simulate, estimate, analyze, netsim, reproduce and replay
"""
import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from src import __version__
from src.bias.metrics import (
    BiasSeries,
    bias_from_intensities,
    empirical_bias,
    stationary_bias,
    windowed_bias_series,
)
from src.errors import DataIOError, HomophilyError, NonStationaryError, UndefinedBiasError, UsageError
from src.estimation.fit import MU_MODES, DiagonalFit, estimate_windowed
from src.experiments import REPRODUCTIONS
from src.experiments.policy_comparison import run_policy, run_policy_comparison
from src.hawkes.intensity import REGIME_MODES
from src.hawkes.simulation import simulate
from src.meanfield.dynamics import integrate_meanfield, integrate_meanfield_quadrature, verify_convergence_bound
from src.meanfield.stability import analyze_schedule, analyze_stability
from src.models.group_pair import to_group_matrix
from src.models.sim_config import SimConfig
from src.netsim.policies import BUILTIN_POLICY_NAMES
from src.storage.config import load_hawkes_config, load_netsim_config
from src.storage.event_log_io import read_event_log, write_event_log, write_event_log_csv
from src.storage.exports import (
    pair_labels,
    read_json,
    write_audit_csv,
    write_bias_csv,
    write_csv,
    write_edges_csv,
    write_fits_json,
    write_group_matrix_csv,
    write_margin_csv,
    write_regime_csv,
    write_stability_json,
    write_trajectory_csv,
)
from src.storage.manifest import RunManifest

logger = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "HOMOPHILY_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
FIT_MU_MODES = tuple(mode for mode in MU_MODES if mode != "fixed")


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def setup_logging(verbose=0, quiet=False):
    level = logging.WARNING if quiet else (logging.DEBUG if verbose else logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt="%H:%M:%S", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def output_root():
    return Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT))


def resolve_out_dir(out, command):
    if out is not None:
        return Path(out)
    return output_root() / f"{command}-{datetime.now().strftime('%Y%m%d-%H%M%S')}"


def float_list(text):
    """Comma-separated floats, e.g. "500,1000" """
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def window_arg(text):
    values = float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected START,END, got {text!r}")
    return tuple(values)


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def replicate_seeds(seed, replicates):
    """Integer seeds of independent replicates; a single run keeps the given seed"""
    if replicates == 1:
        return [int(seed)]
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(replicates)]


def replicate_dir(out_dir, index, replicates):
    return out_dir if replicates == 1 else out_dir / f"replicate_{index:03d}"


def run_tasks(worker, tasks, jobs):
    """Apply worker to every argument tuple, in order, optionally in worker processes"""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, *zip(*tasks)))
    return [worker(*task) for task in tasks]


# simulate

def _simulate_replicate(run_config, seed, out_dir, fmt):
    log = simulate(run_config.params, run_config.schedule, run_config.horizon, seed=seed,
                   regime_mode=run_config.regime_mode)
    path = out_dir / f"events.{fmt}"
    if fmt == "csv":
        write_event_log_csv(log, path)
    else:
        write_event_log(log, path)
    row = {"seed": seed, "n_events": len(log), "path": str(path)}
    row.update({f"N_{label}": int(n) for label, n in zip(pair_labels(log.n_groups), log.counts())})
    return row


def cmd_simulate(args, manifest, out_dir):
    run_config = load_hawkes_config(args.config)
    if args.horizon is not None and args.horizon <= 0:
        raise UsageError(f"--horizon must be > 0, got {args.horizon}")
    run_config = run_config.with_overrides(horizon=args.horizon, seed=args.seed)
    manifest.add_input("config", args.config)
    manifest.update_config(run_config.to_dict())
    manifest.seed = run_config.seed

    seeds = replicate_seeds(run_config.seed, args.replicates)
    tasks = [(run_config, seed, replicate_dir(out_dir, r, args.replicates), args.format)
             for r, seed in enumerate(seeds)]
    rows = run_tasks(_simulate_replicate, tasks, args.jobs)
    summary = pd.DataFrame(rows)
    summary.insert(0, "replicate", range(len(rows)))
    write_csv(summary, out_dir / "summary.csv")
    for row in rows:
        manifest.add_output(f"events_{row['seed']}", row["path"])
    manifest.add_output("summary", out_dir / "summary.csv")


# estimate

def cmd_estimate(args, manifest, out_dir):
    log = read_event_log(args.log)
    manifest.add_input("log", args.log)
    manifest.update_config({"breakpoints": args.breakpoints, "beta": args.beta, "mu_mode": args.mu_mode,
                            "mu_from_window": args.mu_from_window, "tie_mu_wc": args.tie_mu_wc,
                            "min_events": args.min_events})
    if len(log) == 0:
        logger.warning("Event log %s is empty; every pair will be flagged", args.log)
    fits = estimate_windowed(log, args.breakpoints, beta=args.beta, mu_mode=args.mu_mode,
                             baseline_window=args.mu_from_window, tie_mu_wc=args.tie_mu_wc,
                             min_events=args.min_events)
    grid = np.linspace(0.0, log.horizon, args.grid_points)
    series = BiasSeries(grid, empirical_bias(log, grid), windowed_bias_series(fits, grid, args.tie_mu_wc),
                        source="window-estimated")
    outputs = {
        "fits": out_dir / "fits.json",
        "regime_table": out_dir / "regime_table.csv",
        "bias": out_dir / "bias.csv",
    }
    write_fits_json(fits, outputs["fits"])
    write_regime_csv(fits, outputs["regime_table"])
    write_bias_csv(series, outputs["bias"])
    for k, fit in enumerate(fits):
        path = out_dir / f"alpha_matrix_window{k}.csv"
        write_group_matrix_csv(to_group_matrix(fit.alpha_hat, fit.n_groups), path, "alpha")
        outputs[f"alpha_matrix_{k}"] = path
    for name, path in outputs.items():
        manifest.add_output(name, path)


# analyze

def _stationary_bias_or_none(params, A):
    try:
        return stationary_bias(params.with_matrix(A))
    except (NonStationaryError, UndefinedBiasError) as exc:
        logger.warning("No stationary bias: %s", exc)
        return None


def _analyze_fits(document, args, manifest, out_dir):
    fits = [DiagonalFit.from_dict(window) for window in document["windows"]]
    reports = [analyze_stability(fit.to_params(), interval=fit.window) for fit in fits]
    rows = []
    for fit, report in zip(fits, reports):
        try:
            b_star = stationary_bias(fit)
        except UndefinedBiasError:
            b_star = np.nan
        rows.append({"window_start": fit.window[0], "window_end": fit.window[1],
                     "spectral_radius": report.spectral_radius, "regime": report.regime,
                     "stationary_bias": b_star})
    write_stability_json(reports, out_dir / "stability.json")
    write_csv(pd.DataFrame(rows), out_dir / "window_bias.csv")
    manifest.add_output("stability", out_dir / "stability.json")
    manifest.add_output("window_bias", out_dir / "window_bias.csv")


def _analyze_params(args, manifest, out_dir):
    run_config = load_hawkes_config(args.input)
    params, schedule = run_config.params, run_config.schedule
    horizon = run_config.horizon if args.horizon is None else args.horizon
    if horizon <= 0:
        raise UsageError(f"--horizon must be > 0, got {horizon}")
    if schedule is not None and schedule.end > horizon:
        raise UsageError(f"--horizon {horizon} ends before the last breakpoint {schedule.end}")
    manifest.update_config(run_config.to_dict())

    if schedule is None:
        reports = [analyze_stability(params, interval=(0.0, horizon))]
    else:
        reports = analyze_schedule(params, schedule)
    extra = {"stationary_bias": [_stationary_bias_or_none(params, A) for A in
                                 ([params.A] if schedule is None else schedule.matrices)]}

    if args.quadrature:
        trajectory = integrate_meanfield_quadrature(params, schedule, horizon, args.step)
    else:
        trajectory = integrate_meanfield(params, schedule, horizon, args.step, regime_mode=args.regime_mode)
    extra["overflow_time"] = trajectory.overflow_time
    grid = np.linspace(0.0, horizon, args.grid_points)
    values = np.array([trajectory.value_at(t) for t in grid])
    with np.errstate(invalid="ignore", over="ignore"):
        b_inst = bias_from_intensities(values, params.n_groups)
    series = BiasSeries(grid, np.full(grid.size, np.nan), b_inst, source="mean-field")

    if args.verify_bound:
        try:
            check = verify_convergence_bound(trajectory, reports, safety=args.safety)
        except NonStationaryError as exc:
            logger.warning("Bound not checked: %s", exc)
            extra["bound"] = {"checked": False, "reason": str(exc), "safety": args.safety}
        else:
            extra["bound"] = {"checked": True, "passed": check.passed, "safety": args.safety,
                              "empirical_c": check.empirical_c.tolist(),
                              "failing_intervals": check.failing_intervals()}
            write_margin_csv(check, out_dir / "margins.csv")
            manifest.add_output("margins", out_dir / "margins.csv")

    write_stability_json(reports, out_dir / "stability.json", extra)
    write_trajectory_csv(trajectory, out_dir / "trajectory.csv")
    write_bias_csv(series, out_dir / "bias.csv")
    for name in ("stability", "trajectory", "bias"):
        manifest.add_output(name, out_dir / f"{name}.{'json' if name == 'stability' else 'csv'}")
    for report in reports:
        logger.info("%s on %s", report, report.interval)


def cmd_analyze(args, manifest, out_dir):
    manifest.add_input("input", args.input)
    try:
        document = read_json(args.input)
    except DataIOError:
        document = None
    if isinstance(document, dict) and "windows" in document:
        _analyze_fits(document, args, manifest, out_dir)
    else:
        _analyze_params(args, manifest, out_dir)


# netsim

def _netsim_task(config, policy_name, out_dir):
    run = run_policy(config, policy_name)
    grid = np.arange(0.0, run.log.horizon + 0.5)
    series = BiasSeries(grid, empirical_bias(run.log, grid), windowed_bias_series(run.fits, grid),
                        source="window-estimated")
    write_edges_csv(run.graph, out_dir / "edges.csv")
    write_event_log(run.log, out_dir / "events.jsonl")
    write_audit_csv(run.audit, out_dir / "audit.csv")
    write_fits_json(run.fits, out_dir / "fits.json")
    write_group_matrix_csv(run.alpha_matrix, out_dir / "alpha_matrix.csv", "alpha")
    write_group_matrix_csv(run.mu_matrix, out_dir / "mu_matrix.csv", "mu")
    write_bias_csv(series, out_dir / "bias.csv")
    return run.summary()


def cmd_netsim(args, manifest, out_dir):
    config = load_netsim_config(args.config) if args.config else SimConfig()
    if args.config:
        manifest.add_input("config", args.config)
    if args.seed is not None:
        config = config.copy_with(seed=args.seed)
    unknown = [name for name in args.policy if name not in BUILTIN_POLICY_NAMES]
    if unknown:
        raise UsageError(f"unknown policy {unknown[0]!r}; built-in policies: {', '.join(BUILTIN_POLICY_NAMES)}")
    periods = args.retrain if args.retrain is not None else [config.retrain_period]
    manifest.update_config(config.to_dict())
    manifest.seed = config.seed

    tasks = []
    for r, seed in enumerate(replicate_seeds(config.seed, args.replicates)):
        base = replicate_dir(out_dir, r, args.replicates)
        for name in args.policy:
            for period in periods:
                run_dir = base / name if len(periods) == 1 else base / f"{name}_retrain{period}"
                tasks.append((config.copy_with(seed=seed, retrain_period=period), name, run_dir))
    rows = run_tasks(_netsim_task, tasks, args.jobs)
    summary = pd.DataFrame(rows)
    write_csv(summary, out_dir / "summary.csv")
    manifest.add_output("summary", out_dir / "summary.csv")
    for _, _, run_dir in tasks:
        manifest.add_output(str(run_dir.relative_to(out_dir)), run_dir)
    ranking = summary.groupby("policy", sort=False)["stationary_bias"].mean().sort_values(ascending=False)
    for name, value in ranking.items():
        logger.info("B*_inst %-20s %.4f", name, value)


# reproduce

def cmd_reproduce(args, manifest, out_dir):
    seeds = list(range(args.seeds)) if args.seeds is not None else None
    if args.figure == "policies":
        config = load_netsim_config(args.config) if args.config else SimConfig()
        kwargs = {"jobs": args.jobs, "out_dir": out_dir}
        if seeds is not None:
            kwargs["seeds"] = seeds
        run_policy_comparison(config, **kwargs)
        manifest.update_config(config.to_dict())
        for name in ("runs", "summary"):
            manifest.add_output(name, out_dir / f"{name}.csv")
        return
    kwargs = {"out_dir": out_dir}
    if args.figure == "regimes" and seeds is not None:
        kwargs["seeds"] = seeds
    REPRODUCTIONS[args.figure](**kwargs)
    for path in sorted(out_dir.glob("*.*")):
        if path.name != "manifest.json":
            manifest.add_output(path.stem, path)


# replay

def cmd_replay(args):
    """Re-execute a recorded command line into the manifest's directory or --out"""
    manifest = RunManifest.load(args.manifest)
    path = Path(args.manifest)
    directory = path if path.is_dir() else path.parent
    argv = manifest.argv + ["--out", str(args.out or directory)]
    logger.info("Replaying run %s: %s", manifest.run_id, " ".join(argv))
    return main(argv)


def build_parser():
    parser = ArgumentParser(prog="homophily", description="Group-pair Hawkes analysis of homophily dynamics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    def with_output(sub):
        sub.add_argument("--out", default=None, help=f"output directory (default: ${OUTPUT_ROOT_ENV}/<command>-<time>)")
        return sub

    def with_replicates(sub):
        sub.add_argument("--replicates", type=positive_int, default=1, help="independent replicates")
        sub.add_argument("--jobs", type=positive_int, default=1, help="worker processes")
        return sub

    sub = with_replicates(with_output(commands.add_parser("simulate", help="simulate a Hawkes event log")))
    sub.add_argument("config", help="hawkes config JSON")
    sub.add_argument("--horizon", type=float, default=None, help="override the config horizon")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")

    sub = with_output(commands.add_parser("estimate", help="fit diagonal models per window"))
    sub.add_argument("log", help="event log (.jsonl or .csv)")
    sub.add_argument("--breakpoints", type=float_list, default=[], help="comma-separated window breakpoints")
    sub.add_argument("--beta", type=float, default=1.0, help="fixed decay rate")
    sub.add_argument("--mu-mode", choices=FIT_MU_MODES, default="joint", help="baseline estimation mode")
    sub.add_argument("--mu-from-window", type=window_arg, default=None, metavar="START,END",
                     help="hold baselines at N/T of this window")
    sub.add_argument("--tie-mu-wc", action="store_true", help="tie aggregate within and cross baselines")
    sub.add_argument("--min-events", type=int, default=5, help="low-data threshold per pair")
    sub.add_argument("--grid-points", type=positive_int, default=501, help="bias grid size")

    sub = with_output(commands.add_parser("analyze", help="stability, mean field and bias of a model"))
    sub.add_argument("input", help="hawkes config JSON or fits JSON from estimate")
    sub.add_argument("--horizon", type=float, default=None, help="mean-field horizon")
    sub.add_argument("--step", type=float, default=None, help="integrator step")
    sub.add_argument("--regime-mode", choices=REGIME_MODES, default="freeze", help="mean-field switch semantics")
    sub.add_argument("--quadrature", action="store_true", help="solve the integral equation instead")
    sub.add_argument("--verify-bound", action="store_true", help="check the exponential convergence bound")
    sub.add_argument("--safety", type=float, default=0.9, help="safety factor of the bound rate")
    sub.add_argument("--grid-points", type=positive_int, default=501, help="bias grid size")

    sub = with_replicates(with_output(commands.add_parser("netsim", help="simulate recommender feedback")))
    sub.add_argument("--config", default=None, help="netsim config JSON (default: built-in defaults)")
    sub.add_argument("--policy", nargs="+", default=["homophily-boost"], help="policies to run")
    sub.add_argument("--retrain", type=int, nargs="+", default=None, help="retrain periods to compare")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")

    sub = with_output(commands.add_parser("reproduce", help="regenerate figure and table data"))
    sub.add_argument("figure", choices=sorted(REPRODUCTIONS) + ["policies"])
    sub.add_argument("--seeds", type=positive_int, default=None, help="number of seeds")
    sub.add_argument("--config", default=None, help="netsim config for the policy comparison")
    sub.add_argument("--jobs", type=positive_int, default=1, help="worker processes")

    sub = commands.add_parser("replay", help="re-run the command recorded in a manifest")
    sub.add_argument("manifest", help="manifest.json or the directory holding it")
    sub.add_argument("--out", default=None, help="output directory (default: the manifest's)")
    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "analyze": cmd_analyze,
    "netsim": cmd_netsim,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    """
    Run one command

    Returns:
        int: 0 on success, 1 usage or config errors, 2 IO errors, 3 numerical failures
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        setup_logging()
        logger.error("%s", exc)
        return exc.exit_code
    except SystemExit as exc:
        return exc.code or 0
    setup_logging(args.verbose, args.quiet)

    try:
        if args.command == "replay":
            return cmd_replay(args)
        out_dir = resolve_out_dir(args.out, args.command)
        manifest = RunManifest(args.command, argv)
        COMMANDS[args.command](args, manifest, out_dir)
        manifest.finish()
        manifest.write(out_dir)
    except HomophilyError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        logger.error("numerical failure: %s", exc)
        return 3
    logger.info("Outputs in %s", out_dir)
    return 0

import logging
import math

import numpy as np
import pytest

from src.errors import IllConditionedError, NonStationaryError, ValidationError
from src.experiments.presets import (
    non_normal_params,
    non_normal_schedule,
    stability_params,
    stability_schedule,
)
from src.hawkes.intensity import intensity_path
from src.hawkes.simulation import simulate
from src.meanfield.dynamics import (
    default_step,
    integrate_meanfield,
    integrate_meanfield_quadrature,
    verify_convergence_bound,
)
from src.meanfield.stability import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    StabilityReport,
    analyze_schedule,
    analyze_stability,
    classify,
    spectral_radius,
    stationary_intensity,
)
from src.models.hawkes_params import HawkesParams
from src.models.regime_schedule import RegimeSchedule


def scalar_params(mu=0.8, alpha=0.4):
    return HawkesParams.diagonal(1, [mu], [alpha], 1.0)


def test_stationary_intensity_solves_the_fixed_point(two_group):
    oracle = np.linalg.solve(np.eye(3) - two_group.A, two_group.mu)
    lam = stationary_intensity(two_group)
    np.testing.assert_allclose(lam, oracle, rtol=1e-10)
    np.testing.assert_allclose((np.eye(3) - two_group.A / two_group.beta) @ lam, two_group.mu, atol=1e-10)


def test_stationary_intensity_closed_forms(poisson_params):
    np.testing.assert_array_equal(stationary_intensity(poisson_params), poisson_params.mu)
    assert stationary_intensity(scalar_params())[0] == pytest.approx(4 / 3, rel=1e-12)


def test_spectral_radius_scales_linearly(two_group):
    rho = spectral_radius(two_group.A, 1.0)
    for c in (0.25, 0.5, 1.0):
        assert spectral_radius(c * two_group.A, 1.0) == pytest.approx(c * rho, rel=1e-10)
    assert spectral_radius(np.diag([0.4, 0.75, 0.5]), 1.0) == 0.75
    assert spectral_radius(two_group.A, 2.0) == pytest.approx(rho / 2, rel=1e-10)
    with pytest.raises(ValidationError):
        spectral_radius(two_group.A, 0.0)


def test_classify_has_a_critical_band():
    assert classify(0.5) == SUBCRITICAL
    assert classify(1.0) == CRITICAL
    assert classify(1.0 + 1e-10) == CRITICAL
    assert classify(1.0 - 1e-10) == CRITICAL
    assert classify(1.0 - 1e-6) == SUBCRITICAL
    assert classify(1.5) == SUPERCRITICAL


def test_non_stationary_regimes_are_refused(two_group):
    with pytest.raises(NonStationaryError) as info:
        stationary_intensity(two_group, A=np.eye(3))
    assert info.value.regime == CRITICAL
    with pytest.raises(NonStationaryError) as info:
        stationary_intensity(two_group, A=3.0 * two_group.A)
    assert info.value.regime == SUPERCRITICAL
    assert info.value.spectral_radius > 1.0


def test_ill_conditioned_solve_is_refused(two_group):
    A = np.zeros((3, 3))
    A[0, 2] = 1e7
    with pytest.raises(IllConditionedError):
        stationary_intensity(two_group, A=A)


def test_analyze_stability_reports_instead_of_raising(two_group, caplog):
    report = analyze_stability(two_group)
    assert report.is_subcritical()
    assert report.kappa_bound == pytest.approx(1.0 - report.spectral_radius)
    assert report.to_dict()["stationary"] == pytest.approx(stationary_intensity(two_group).tolist())

    with caplog.at_level(logging.WARNING):
        hot = analyze_stability(two_group, A=3.0 * two_group.A)
    assert hot.regime == SUPERCRITICAL
    assert hot.stationary is None and hot.kappa_bound is None
    assert "No stationary intensity" in caplog.text


def test_report_requires_consistent_stationary():
    with pytest.raises(ValidationError):
        StabilityReport(1.2, SUPERCRITICAL, 1.0, stationary=[1.0])
    with pytest.raises(ValidationError):
        StabilityReport(0.5, SUBCRITICAL, 1.0)


def test_analyze_schedule_attaches_intervals():
    reports = analyze_schedule(stability_params(), stability_schedule())
    assert [r.interval for r in reports] == [(0.0, 60.0), (60.0, 120.0), (120.0, 180.0)]
    assert all(r.is_subcritical() for r in reports)


def test_trajectory_starts_at_baseline_and_stays_without_excitation(two_group, poisson_params):
    trajectory = integrate_meanfield(two_group, horizon=5.0)
    np.testing.assert_array_equal(trajectory.values[0], two_group.mu)
    assert trajectory.times[-1] == 5.0
    flat = integrate_meanfield(poisson_params, horizon=5.0)
    np.testing.assert_allclose(flat.values, np.tile(poisson_params.mu, (len(flat), 1)), rtol=1e-12)


def test_scalar_trajectory_matches_closed_form():
    trajectory = integrate_meanfield(scalar_params(), horizon=10.0, step=1e-3)
    t = trajectory.times
    expected = 4 / 3 + (0.8 - 4 / 3) * np.exp(-0.6 * t)
    np.testing.assert_allclose(trajectory.values[:, 0], expected, atol=1e-8)


def test_trajectory_reaches_the_stationary_intensity():
    horizon = 20 / 0.6
    trajectory = integrate_meanfield(scalar_params(), horizon=horizon)
    assert trajectory.final[0] == pytest.approx(4 / 3, abs=1e-6)


def test_default_step():
    assert default_step(1.0) == 0.01
    assert default_step(50.0) == pytest.approx(0.002)


def test_integration_validates_inputs(two_group):
    schedule = RegimeSchedule([0.0, 0.05, 1.0], [two_group.A, two_group.A])
    with pytest.raises(ValidationError):
        integrate_meanfield(two_group, schedule, horizon=1.0, step=0.1)
    with pytest.raises(ValidationError):
        integrate_meanfield(two_group, horizon=0.0)
    with pytest.raises(ValidationError):
        integrate_meanfield(two_group, horizon=1.0, step=-0.1)
    with pytest.raises(ValidationError):
        integrate_meanfield(two_group, horizon=1.0, regime_mode="smooth")


def test_breakpoints_lie_on_the_grid():
    trajectory = integrate_meanfield(stability_params(), stability_schedule(), horizon=180.0, step=0.07)
    for b in (60.0, 120.0, 180.0):
        assert np.any(trajectory.times == b)


def test_supercritical_trajectory_stops_at_overflow(caplog):
    # lambda_bar = 0.75 exp(2t) - 0.25 leaves the float range near t = 355
    params = scalar_params(mu=0.5, alpha=3.0)
    with caplog.at_level(logging.WARNING):
        trajectory = integrate_meanfield(params, horizon=1000.0, step=0.05)
    assert 350.0 < trajectory.overflow_time < 360.0
    before = trajectory.times < trajectory.overflow_time
    assert np.all(np.isfinite(trajectory.values[before]))
    assert np.all(np.isnan(trajectory.values[~before]))
    assert trajectory.times[-1] == 1000.0
    assert "floating-point range" in caplog.text
    quadrature = integrate_meanfield_quadrature(params, horizon=1000.0, step=0.05)
    assert 350.0 < quadrature.overflow_time < 360.0
    assert integrate_meanfield(scalar_params(), horizon=5.0).overflow_time is None


def test_quadrature_agrees_with_rk4(two_group):
    ode = integrate_meanfield(two_group, horizon=10.0, step=0.01)
    quad = integrate_meanfield_quadrature(two_group, horizon=10.0, step=0.001)
    interpolated = np.array([quad.value_at(t) for t in ode.times[::50]])
    np.testing.assert_allclose(interpolated, ode.values[::50], atol=1e-5)


def test_quadrature_agrees_with_rk4_across_switches():
    params = HawkesParams(2, [0.5, 0.4, 0.3], np.diag([0.5, 0.2, 0.1]), 1.0)
    schedule = RegimeSchedule([0.0, 2.0, 4.0], [np.diag([0.5, 0.2, 0.1]), np.full((3, 3), 0.2)])
    ode = integrate_meanfield(params, schedule, horizon=6.0, step=0.01)
    quad = integrate_meanfield_quadrature(params, schedule, horizon=6.0, step=0.001)
    interpolated = np.array([quad.value_at(t) for t in ode.times[::25]])
    np.testing.assert_allclose(interpolated, ode.values[::25], atol=1e-5)


@pytest.mark.parametrize("regime_mode", ["freeze", "reweight"])
def test_state_at_a_switch(regime_mode):
    params = HawkesParams.diagonal(2, [1.0, 0.0, 1.0], [0.5, 0.0, 0.2], 1.0)
    schedule = RegimeSchedule([0.0, 10.0, 20.0], [np.diag([0.5, 0.0, 0.2]), np.diag([0.1, 0.0, 0.6])])
    trajectory = integrate_meanfield(params, schedule, horizon=20.0, regime_mode=regime_mode)
    (k,) = np.where(trajectory.times == 10.0)[0]
    before, at = trajectory.values[k - 1], trajectory.values[k]
    np.testing.assert_allclose(before, [2.0, 0.0, 1.25], atol=0.02)
    if regime_mode == "freeze":
        np.testing.assert_allclose(at, before, atol=0.01)
    else:
        np.testing.assert_allclose(at, [1.2, 0.0, 1.75], atol=0.02)


def test_three_interval_schedule_meets_the_bound():
    params, schedule = stability_params(), stability_schedule()
    trajectory = integrate_meanfield(params, schedule, horizon=180.0)
    check = verify_convergence_bound(trajectory, analyze_schedule(params, schedule), safety=0.9)
    assert check.passed
    assert check.failing_intervals() == []
    assert len(check.kappas) == 3
    assert np.all(check.empirical_c <= 1.0 + 1e-9)
    assert np.nanmin(check.margin) >= -1e-12


def test_equilibrium_start_passes_vacuously(poisson_params):
    check = verify_convergence_bound(integrate_meanfield(poisson_params, horizon=5.0))
    assert check.passed
    assert np.all(np.isnan(check.ratio))


def test_non_normal_switch_overshoots_the_bound(caplog):
    params, schedule = non_normal_params(), non_normal_schedule()
    trajectory = integrate_meanfield(params, schedule, horizon=50.0)
    with caplog.at_level(logging.WARNING):
        check = verify_convergence_bound(trajectory)
    assert not check.passed
    assert check.failing_intervals() == [1]
    assert check.empirical_c[0] <= 1.0 + 1e-9
    assert check.empirical_c[1] > 1.0
    assert "Convergence bound violated" in caplog.text


def test_bound_check_validates_inputs(two_group):
    trajectory = integrate_meanfield(two_group, horizon=2.0)
    with pytest.raises(ValidationError):
        verify_convergence_bound(trajectory, safety=1.0)
    hot = HawkesParams(2, two_group.mu, 3.0 * two_group.A, 1.0)
    with pytest.raises(NonStationaryError):
        verify_convergence_bound(integrate_meanfield(hot, horizon=2.0))


@pytest.mark.slow
def test_mean_field_matches_simulated_average(two_group):
    horizon, replicates = 20.0, 2000
    kappa = analyze_stability(two_group).kappa_bound
    grid = np.linspace(min(5.0 / kappa, 15.0), horizon - 0.5, 12)
    total = np.zeros((grid.size, 3))
    for seed in range(replicates):
        log = simulate(two_group, horizon=horizon, seed=seed)
        total += intensity_path(two_group, log, grid)
    average = total / replicates
    trajectory = integrate_meanfield(two_group, horizon=horizon)
    expected = np.array([trajectory.value_at(t) for t in grid])
    assert np.max(np.abs(average - expected) / expected) < 0.05


def test_step_count_rounding_keeps_exact_end():
    trajectory = integrate_meanfield(scalar_params(), horizon=1.0, step=0.3)
    assert len(trajectory) == 5
    assert trajectory.times[-1] == 1.0
    assert math.isclose(trajectory.times[1], 0.25)

import numpy as np
import pytest

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
from src.errors import NonStationaryError, UndefinedBiasError, ValidationError
from src.estimation.fit import DiagonalFit
from src.experiments.presets import regime_params, regime_schedule
from src.experiments.regimes import oracle_stationary_bias, run_replicate
from src.meanfield.dynamics import integrate_meanfield
from src.meanfield.stability import analyze_stability
from src.models.event_log import EventLog
from src.models.hawkes_params import HawkesParams


def fit(mu, alpha, window=(0.0, 10.0), n_groups=2):
    return DiagonalFit(n_groups, mu, alpha, 1.0, [0.0] * len(mu), window, ["ok"] * len(mu))


def test_instantaneous_bias():
    assert instantaneous_bias(1.0, 1.0) == 0.5
    assert instantaneous_bias(2.0, 0.0) == 1.0
    assert instantaneous_bias(3.0, 1.0) == 0.75
    with pytest.raises(UndefinedBiasError):
        instantaneous_bias(0.0, 0.0)
    with pytest.raises(ValidationError):
        instantaneous_bias(-1.0, 2.0)


def test_empirical_bias_counts_events_up_to_t(small_log):
    values = empirical_bias(small_log, [0.2, 0.5, 1.0, 3.0])
    assert np.isnan(values[0])
    np.testing.assert_allclose(values[1:], [1.0, 0.5, 0.75])


def test_empirical_bias_of_purely_within_log():
    log = EventLog.from_events(2, [(1.0, (1, 1)), (2.0, (2, 2)), (3.0, (1, 1))], 5.0)
    values = empirical_bias(log, [1.0, 2.5, 4.0])
    np.testing.assert_array_equal(values, 1.0)


def test_bias_from_intensities_over_a_path():
    values = bias_from_intensities(np.array([[1.0, 1.0, 2.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), 2)
    assert values[0] == 0.5
    assert np.isnan(values[1])
    assert values[2] == 1.0


def test_stationary_bias_of_a_diagonal_fit():
    diagonal = fit([0.8, 0.8, 0.8], [0.4, 0.4, 0.0])
    expected = (8 / 3) / (8 / 3 + 0.8)
    assert stationary_bias(diagonal) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.769, abs=5e-4)
    params = HawkesParams.diagonal(2, [0.8, 0.8, 0.8], [0.4, 0.4, 0.0], 1.0)
    assert stationary_bias(params) == pytest.approx(expected, rel=1e-12)


def test_stationary_bias_of_the_two_group_model(two_group):
    lam = np.linalg.solve(np.eye(3) - two_group.A, two_group.mu)
    expected = (lam[0] + lam[1]) / lam.sum()
    assert stationary_bias(two_group) == pytest.approx(expected, rel=1e-10)


def test_tied_baselines_without_excitation_give_half(poisson_params):
    assert stationary_bias(poisson_params, tie_mu_wc=True) == pytest.approx(0.5)
    assert stationary_bias(fit([0.5, 0.3, 0.2], [0.0, 0.0, 0.0]), tie_mu_wc=True) == pytest.approx(0.5)


def test_stationary_bias_errors(two_group):
    with pytest.raises(NonStationaryError):
        stationary_bias(two_group.with_matrix(3.0 * two_group.A))
    with pytest.raises(UndefinedBiasError):
        stationary_bias(fit([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]))


def test_windowed_bias_series_is_a_step_function():
    fits = [fit([1.0, 0.0, 1.0], [0.0, 0.0, 0.0], (0.0, 5.0)),
            fit([3.0, 0.0, 1.0], [0.0, 0.0, 0.0], (5.0, 10.0))]
    values = windowed_bias_series(fits, [0.0, 4.9, 5.0, 10.0, 11.0])
    np.testing.assert_allclose(values[:4], [0.5, 0.5, 0.75, 0.75])
    assert np.isnan(values[4])


def test_undefined_window_is_nan():
    values = windowed_bias_series([fit([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])], [1.0, 2.0])
    assert np.all(np.isnan(values))


def test_bias_series_validation():
    series = BiasSeries([0.0, 1.0], [np.nan, 1.0])
    assert np.all(np.isnan(series.b_inst))
    assert len(series) == 2
    with pytest.raises(ValidationError):
        BiasSeries([0.0, 1.0], [0.5], source="mean-field")
    with pytest.raises(ValidationError):
        BiasSeries([0.0], [0.5], source="guessed")


def test_demographic_parity_gap():
    groups = {0: 1, 1: 1, 2: 2, 3: 2}
    predictions = [((0, 1), 1), ((2, 3), 0), ((0, 2), 1), ((1, 3), 0)]
    assert demographic_parity_gap(predictions, groups) == pytest.approx(0.0)
    predictions = [((0, 1), 1), ((2, 3), 1), ((0, 2), 1), ((1, 3), 0)]
    assert demographic_parity_gap(predictions, groups) == pytest.approx(0.5)
    with pytest.raises(UndefinedBiasError):
        demographic_parity_gap([((0, 1), 1)], groups)


def test_parity_gap_from_counts():
    assert parity_gap_from_counts(3, 4, 1, 4) == pytest.approx(0.5)
    with pytest.raises(UndefinedBiasError):
        parity_gap_from_counts(0, 0, 1, 4)


def test_instantaneous_bias_converges_to_stationary(two_group):
    kappa = analyze_stability(two_group).kappa_bound
    settle = 20.0 / kappa
    trajectory = integrate_meanfield(two_group, horizon=settle + 5.0)
    late = trajectory.times >= settle
    values = bias_from_intensities(trajectory.values[late], 2)
    np.testing.assert_allclose(values, stationary_bias(two_group), atol=1e-4)


def test_oracle_bias_per_regime():
    params = regime_params()
    expected = []
    for A in regime_schedule().matrices:
        lam = params.mu / (1.0 - np.diag(A))
        expected.append(lam[0] / (lam[0] + lam[2]))
    np.testing.assert_allclose(oracle_stationary_bias(), expected, rtol=1e-10)


@pytest.mark.slow
def test_estimated_bias_jumps_ahead_of_the_empirical_bias():
    grid = np.array([499.0, 500.0, 550.0])
    runs = [run_replicate(seed, grid=grid) for seed in range(10)]
    estimated = np.array([windowed_bias_series(run.fits, grid) for run in runs])
    observed = np.array([empirical_bias(run.log, grid) for run in runs])
    jump = np.mean(estimated[:, 1] - estimated[:, 0])
    drift = np.mean(np.abs(observed[:, 2] - observed[:, 1]))
    assert jump > 0.1
    assert drift < jump

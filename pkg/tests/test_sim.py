"""
Tests del simulador Monte Carlo y de las métricas de error.
"""

import math

import numpy as np
import pytest

from analysis.analytic import lemma1_throughput, renewal_throughput
from network.model import EHProbabilities
from simulation.collector import ResultCollector
from simulation.rng import SEED_MAX, make_generator, require_seed, spawn_seeds
from simulation.sim import (
    SIM_CSV_COLUMNS,
    SimulationConfig,
    compare,
    csv_row,
    error_metrics,
    error_profile,
    relative_error,
    run,
    run_many,
    run_stepwise,
)
from utils.errors import OutOfRange, ZeroAnalyticValue


def _sim(make_config, gammas, probs, horizon, seed=7, delta_prime=5.0, caps=None):
    return SimulationConfig(horizon, seed, make_config(gammas, probs, delta_prime, caps))


def test_never_harvesting_network(make_config):
    result = run(_sim(make_config, (3, 2), EHProbabilities(1.0, 0.0, 0.0, 0.0), 1000))
    assert result.report.total == 0.0
    assert result.collisions == 0
    assert result.occupancy[0, 0] == pytest.approx(1.0)


def test_single_harvester_transmits_every_gamma_slots(make_config):
    config = _sim(make_config, (3, 2), EHProbabilities(0.0, 1.0, 0.0, 0.0), 300, delta_prime=2.0)
    result = run(config)
    assert result.successes1 == 100
    assert result.successes2 == 0
    assert result.report.r1 == pytest.approx(math.log(7) / 3)


def test_simultaneous_harvest_always_collides(make_config):
    result = run(_sim(make_config, (2, 2), EHProbabilities(0.0, 0.0, 0.0, 1.0), 1000))
    assert result.collisions == 500
    assert result.successes1 == result.successes2 == 0


@pytest.mark.parametrize("gammas, probs", [
    ((3, 4), EHProbabilities(0.25, 0.25, 0.25, 0.25)),
    ((4, 6), EHProbabilities(0.5, 0.0, 0.0, 0.5)),
    ((1, 5), EHProbabilities(0.1, 0.2, 0.3, 0.4)),
])
def test_vectorized_kernel_matches_stepwise(make_config, gammas, probs):
    """El kernel por bloques reproduce slot a slot la corrida de referencia."""
    config = _sim(make_config, gammas, probs, 3000, seed=99)
    oracle = run_stepwise(config)
    for chunk_size in (64, 1000, 1 << 20):
        result = run(config, chunk_size=chunk_size)
        assert (result.successes1, result.successes2) == (oracle.successes1, oracle.successes2)
        assert result.collisions == oracle.collisions
        assert result.report == oracle.report
        np.testing.assert_array_equal(result.occupancy, oracle.occupancy)


def test_same_seed_same_result(make_config, independent):
    config = _sim(make_config, (5, 9), independent, 10_000, seed=7, delta_prime=30.0)
    a, b = run(config), run(config)
    assert a.report == b.report
    assert a.collisions == b.collisions
    other = run(SimulationConfig(10_000, 8, config.network))
    assert (other.successes1, other.successes2) != (a.successes1, a.successes2)


def test_occupancy_is_a_distribution(make_config, independent):
    result = run(_sim(make_config, (4, 3), independent, 5000))
    assert result.occupancy.shape == (4, 3)
    assert result.occupancy.sum() == pytest.approx(1.0)


def test_std_error_needs_two_batches(make_config, independent):
    config = _sim(make_config, (2, 2), independent, 1000)
    assert all(math.isnan(se) for se in run(config, batches=1).std_error)
    assert all(se > 0.0 for se in run(config, batches=20).std_error)
    # horizonte menor que el número de lotes
    short = run(_sim(make_config, (1, 1), independent, 5), batches=20)
    assert not math.isnan(short.std_error[2])


def test_collision_rate_under_positive_correlation(make_config, high_positive):
    """Con γ=(4,6) colisionan una vez cada LCM = 12 cosechas: tasa p/12."""
    result = run(_sim(make_config, (4, 6), high_positive, 200_000, delta_prime=1.0))
    assert result.collisions / 200_000 == pytest.approx(0.5 / 12, abs=1e-3)


def test_simulation_config_validation(make_config, independent):
    network = make_config((2, 2), independent)
    with pytest.raises(OutOfRange):
        SimulationConfig(0, 1, network)
    with pytest.raises(OutOfRange):
        SimulationConfig(10, -1, network)


def test_relative_error_and_metrics():
    metrics = error_metrics(2.0, 1.9)
    assert metrics.re_percent == pytest.approx(5.0)
    assert metrics.ae_percent == pytest.approx(10.0)
    with pytest.raises(ZeroAnalyticValue):
        relative_error(0.0, 0.1)


def test_zero_analytic_reports_only_absolute_error():
    metrics = error_metrics(0.0, 0.0)
    assert metrics.re_percent is None
    assert metrics.ae_percent == 0.0


def test_compare_and_csv_row(make_config, high_positive):
    config = _sim(make_config, (5, 5), high_positive, 2000, delta_prime=30.0)
    result = run(config)
    errors = compare(result, renewal_throughput(5, 5, 0.5, 30.0))
    assert errors.total.re_percent is None
    row = csv_row(result, errors)
    assert tuple(row) == SIM_CSV_COLUMNS
    assert row["re_total"] is None
    assert row["seed"] == 7


def test_run_many_preserves_order(make_config, independent):
    configs = [_sim(make_config, (g, 3), independent, 2000, seed=g, caps=(6, 6)) for g in range(1, 7)]
    serial = run_many(configs)
    threaded = run_many(configs, threads=3)
    assert [r.config.network.gamma1 for r in threaded] == list(range(1, 7))
    assert [r.report for r in threaded] == [r.report for r in serial]


def test_error_profile_rows(make_config, independent):
    network = make_config((4, 3), independent, delta_prime=5.0)
    rows = error_profile(network, horizon=2000, seed=3, gamma2=3)
    assert [row.gamma1 for row in rows] == [1, 2, 3, 4]
    assert all(row.result.config.network.gamma2 == 3 for row in rows)
    assert all(row.errors.total.re_percent is not None for row in rows)
    assert [row.result.config.seed for row in rows] == spawn_seeds(3, 4)


def test_error_profile_rejects_gamma2_above_cap(make_config, independent):
    with pytest.raises(OutOfRange):
        error_profile(make_config((4, 3), independent), horizon=100, seed=1, gamma2=4)


def test_spawn_seeds():
    seeds = spawn_seeds(42, 5)
    assert seeds == spawn_seeds(42, 5)
    assert len(set(seeds)) == 5
    assert all(0 <= s <= SEED_MAX for s in seeds)


def test_seed_bounds():
    assert require_seed(SEED_MAX) == SEED_MAX
    with pytest.raises(OutOfRange):
        require_seed(2 ** 64)
    with pytest.raises(OutOfRange):
        make_generator(-3)


def test_collector():
    collector = ResultCollector()
    collector.start(3)
    collector.add(2, "c")
    collector.add(0, "a")
    collector.fail(1, "boom")
    assert collector.results() == ["a", "c"]
    snapshot = collector.get_snapshot()
    assert snapshot["done"] == 2 and snapshot["failed"] == 1
    assert snapshot["progress"] == 66
    with pytest.raises(KeyError):
        collector.add(0, "again")


@pytest.mark.slow
def test_simulation_matches_uniform_formula(make_config, independent):
    """T = 10^6: cada tasa dentro de 5σ de la fórmula uniforme."""
    config = _sim(make_config, (3, 4), independent, 1_000_000, seed=1)
    result = run(config)
    analytic = lemma1_throughput(config.network)
    se1, se2, _ = result.std_error
    assert abs(result.report.r1 - analytic.r1) < 5 * se1
    assert abs(result.report.r2 - analytic.r2) < 5 * se2
    np.testing.assert_allclose(result.occupancy, 1.0 / 12, atol=2e-3)


@pytest.mark.slow
def test_relative_error_shrinks_with_horizon(make_config):
    probs = EHProbabilities(0.1, 0.2, 0.3, 0.4)
    network = make_config((5, 9), probs, delta_prime=30.0)
    analytic = lemma1_throughput(network).total
    errors = []
    for horizon in (10_000, 1_000_000):
        result = run(SimulationConfig(horizon, 5, network))
        errors.append(abs(relative_error(analytic, result.report.total)))
    assert errors[1] < 1.0
    assert errors[1] < errors[0] + 0.5

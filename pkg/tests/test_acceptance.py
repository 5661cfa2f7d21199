"""
Criterios de aceptación de extremo a extremo.

Las corridas largas (T = 10^6 o la rejilla completa de uniformidad) llevan
la marca `slow`: `pytest -m "not slow"` las omite.
"""

import math

import numpy as np
import pytest

from analysis.analytic import lemma1_throughput, negative_corr_gradient, renewal_throughput
from analysis.optimize import (
    APPROX_SMALL,
    closed_form_negative,
    closed_form_positive_small,
    exhaustive_search,
    gcd_drop_pairs,
    objective_surface,
)
from cli.verify import check_gradient, check_simulation, check_uniformity
from main import main
from network.markov import stationary_throughput, steady_state_for
from network.model import EHProbabilities, NetworkConfig
from simulation.sim import SimulationConfig, error_metrics, run

VERIFY_SETTINGS = {
    "uniformity_max_gamma": 10,
    "uniformity_trials": 50,
    "uniformity_tolerance": 1e-9,
    "sim_configs": 20,
    "sigma_bound": 3.0,
    "re_bound_percent": 2.0,
    "gradient_points": 200,
}


@pytest.mark.slow
def test_uniform_steady_state_over_full_grid():
    network = NetworkConfig(10, 10, 1, 1, 5.0, EHProbabilities.independent())
    result = check_uniformity(network, VERIFY_SETTINGS, seed=2024)
    assert result.passed, result.failures[:5]


@pytest.mark.slow
def test_uniform_formula_against_monte_carlo():
    network = NetworkConfig(10, 10, 1, 1, 5.0, EHProbabilities.independent())
    sim = SimulationConfig(1_000_000, 2024, network)
    result = check_simulation(network, sim, VERIFY_SETTINGS, threads=4, batches=20)
    assert result.passed, result.failures


def test_high_negative_optimum():
    probs = EHProbabilities.high_negative(0.5)
    outcome = exhaustive_search((10, 10), probs, 5.0)
    assert outcome.ties == [(1, 1)]
    assert closed_form_negative((10, 10), 0.5, 5.0).best == (1, 1)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("delta_prime", [0.1, 1.0, 10.0])
def test_negative_rule_matches_search(p, delta_prime):
    outcome = exhaustive_search((6, 8), EHProbabilities.high_negative(p), delta_prime)
    assert outcome.ties == closed_form_negative((6, 8), p, delta_prime).ties


def test_negative_rule_single_point_grid():
    assert closed_form_negative((1, 1), 0.5, 5.0).best == (1, 1)


def test_high_positive_large_delta_ties():
    outcome = exhaustive_search((10, 10), EHProbabilities.high_positive(0.5), 30.0)
    assert set(outcome.ties) == {(1, 10), (10, 1)}


@pytest.mark.slow
def test_renewal_markov_and_simulation_agree():
    config = NetworkConfig(4, 6, 4, 6, 1.0, EHProbabilities.high_positive(0.5))
    renewal = renewal_throughput(4, 6, 0.5, 1.0)
    markov = stationary_throughput(steady_state_for(config), config)
    result = run(SimulationConfig(1_000_000, 17, config))

    assert (renewal.r1, renewal.r2) == pytest.approx((0.1341, 0.0811), abs=1e-4)
    assert markov.r1 == pytest.approx(renewal.r1, abs=1e-9)
    assert markov.r2 == pytest.approx(renewal.r2, abs=1e-9)
    se1, se2, _ = result.std_error
    assert abs(result.report.r1 - renewal.r1) <= 4 * se1
    assert abs(result.report.r2 - renewal.r2) <= 4 * se2


@pytest.mark.parametrize("caps", [(4, 6), (9, 10), (5, 12)])
def test_small_delta_rule_against_searches(caps):
    """Igualdad de empates con el objetivo aproximado a δ′ = 0.04 y con el exacto a δ′ = 1e-4."""
    probs = EHProbabilities.high_positive(0.5)
    closed = closed_form_positive_small(caps, 0.5, 0.04)
    assert exhaustive_search(caps, probs, 0.04, objective=APPROX_SMALL).ties == closed.ties
    assert exhaustive_search(caps, probs, 1e-4).ties == closed.ties


def test_gcd_drops_visible_in_surface():
    points = objective_surface((10, 10), EHProbabilities.high_positive(0.5), 0.04)
    report = gcd_drop_pairs(points)
    assert report["drops"]
    assert report["violations"] == []


def test_negative_gradient():
    result = check_gradient(VERIFY_SETTINGS, seed=5)
    assert result.passed, result.failures[:5]
    # el gradiente cerrado es negativo en los bordes de la región
    for g in (1.0, 50.0):
        assert all(d < 0.0 for d in negative_corr_gradient(g, g, 0.5, 10.0))


def test_simulation_csv_is_reproducible(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"]
    base = ["simulate", "--gammas", "5", "9", "--delta-prime", "30", "--horizon", "10000"]
    for path, seed in zip(paths, ("7", "7", "8")):
        assert main(base + ["--seed", seed, "--output", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes() != paths[2].read_bytes()


def test_error_metric_definitions():
    metrics = error_metrics(2.0, 1.9)
    assert (metrics.re_percent, metrics.ae_percent) == pytest.approx((5.0, 10.0))


@pytest.mark.slow
def test_error_profile_relative_error_bound():
    """γ2 = 9, δ′ = 30, T = 10^5: |%RE| ≤ 5 % para todo γ1."""
    network = NetworkConfig(10, 10, 1, 9, 30.0, EHProbabilities.independent())
    for g1 in range(1, 11):
        config = network.with_gammas(g1, 9)
        result = run(SimulationConfig(100_000, g1, config))
        metrics = error_metrics(lemma1_throughput(config).total, result.report.total)
        assert abs(metrics.re_percent) <= 5.0


@pytest.mark.slow
def test_occupancy_converges_to_uniform():
    config = NetworkConfig(10, 10, 5, 9, 30.0, EHProbabilities.independent())
    horizon = 1_000_000
    result = run(SimulationConfig(horizon, 3, config))
    assert np.max(np.abs(result.occupancy - 1.0 / 45)) <= 5.0 / math.sqrt(horizon)

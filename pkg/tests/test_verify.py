"""
Tests de las comprobaciones de `ehnet verify` con parámetros reducidos.
"""

import pytest

from cli.verify import (
    check_closed_forms,
    check_determinism,
    check_gcd_drops,
    check_gradient,
    check_renewal_oracle,
    check_simulation,
    check_uniformity,
)
from simulation.sim import SimulationConfig

FAST = {
    "uniformity_max_gamma": 4,
    "uniformity_trials": 3,
    "uniformity_tolerance": 1e-9,
    "sim_configs": 3,
    "sigma_bound": 3.0,
    "re_bound_percent": 5.0,
    "gradient_points": 10,
    "oracle_tolerance": 1e-9,
    "sim_horizon": 200_000,
}


def test_check_uniformity(make_config, independent):
    result = check_uniformity(make_config((6, 6), independent), FAST, seed=1)
    assert result.passed, result.failures


def test_check_closed_forms(make_config, independent):
    result = check_closed_forms(make_config((10, 10), independent, delta_prime=30.0), threads=1)
    assert result.passed, result.failures


def test_check_gradient():
    result = check_gradient(FAST, seed=2)
    assert result.passed
    assert result.detail == "90 evaluaciones"


def test_check_gcd_drops(make_config, independent):
    assert check_gcd_drops(make_config((10, 10), independent), threads=1).passed


def test_check_determinism(make_config, independent):
    sim = SimulationConfig(5000, 4, make_config((3, 5), independent))
    assert check_determinism(sim).passed


@pytest.mark.slow
def test_check_renewal_oracle():
    result = check_renewal_oracle(FAST, seed=3)
    assert result.passed, result.failures


@pytest.mark.slow
def test_check_simulation(make_config, independent):
    network = make_config((10, 10), independent)
    sim = SimulationConfig(1_000_000, 9, network)
    result = check_simulation(network, sim, FAST, threads=2, batches=20)
    assert result.passed, result.failures

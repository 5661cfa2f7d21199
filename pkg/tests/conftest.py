"""
Fixtures compartidas de la suite.
"""

import sys
from pathlib import Path

import pytest

# Añadir src al path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from network.model import EHProbabilities, NetworkConfig  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: corridas Monte Carlo largas (T ≥ 10^5)")


@pytest.fixture
def independent() -> EHProbabilities:
    return EHProbabilities.independent()


@pytest.fixture
def high_negative() -> EHProbabilities:
    return EHProbabilities.high_negative(0.5)


@pytest.fixture
def high_positive() -> EHProbabilities:
    return EHProbabilities.high_positive(0.5)


@pytest.fixture
def make_config():
    """Fábrica de NetworkConfig con capacidades = umbrales por defecto."""

    def _make(gammas, probs, delta_prime=5.0, caps=None):
        caps = caps or gammas
        return NetworkConfig(caps[0], caps[1], gammas[0], gammas[1], delta_prime, probs)

    return _make

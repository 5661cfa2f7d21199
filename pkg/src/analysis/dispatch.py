"""
Model Dispatch
Elige el modelo exacto según el patrón de probabilidades.
"""

import logging
from enum import Enum

from analysis.analytic import lemma1_throughput, renewal_throughput
from analysis.report import ThroughputReport
from network.markov import stationary_throughput, steady_state_for
from network.model import EHProbabilities, NetworkConfig

logger = logging.getLogger(__name__)


class ModelKind(str, Enum):
    """Modelo exacto aplicable a una ley de recolección."""

    LEMMA1 = "lemma1"
    RENEWAL = "renewal"
    MARKOV = "markov-accounting"


def select_model(probs: EHProbabilities) -> ModelKind:
    """
    lemma1 si p01 > 0 y p10 > 0; renewal si p01 = p10 = 0 y p11 > 0;
    contabilidad de Markov en el resto (incluido p00 = 1).
    """
    if probs.p01 > 0.0 and probs.p10 > 0.0:
        return ModelKind.LEMMA1
    if probs.p01 == 0.0 and probs.p10 == 0.0 and probs.p11 > 0.0:
        return ModelKind.RENEWAL
    return ModelKind.MARKOV


def dispatch_throughput(config: NetworkConfig, model: ModelKind = None) -> ThroughputReport:
    """Throughput exacto con el modelo adecuado (o el forzado en `model`)."""
    model = ModelKind(model) if model else select_model(config.probs)

    if model is ModelKind.LEMMA1:
        return lemma1_throughput(config)
    if model is ModelKind.RENEWAL:
        return renewal_throughput(config.gamma1, config.gamma2, config.probs.p11, config.delta_prime)

    logger.debug(f"Contabilidad de Markov para γ={config.gammas}, probs={config.probs.as_dict()}")
    return stationary_throughput(steady_state_for(config), config)

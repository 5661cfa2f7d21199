"""
Analytic Throughput
Fórmulas cerradas del throughput medio y del objetivo z(γ1, γ2).

Umbrales siempre como enteros exactos; δ′ real; logaritmo natural (nats).
"""

import math
import logging
from typing import Tuple

import numpy as np

from analysis.report import ThroughputReport, ThroughputSource
from network.model import NetworkConfig
from utils.errors import ApproximationDomain, LcmOverflow, PreconditionViolated
from utils.validators import require_open_probability, require_positive_int, require_positive_real

logger = logging.getLogger(__name__)

# LCM/GCD sobre enteros con signo de 64 bits (se usan como índices numpy)
INT64_MAX = np.iinfo(np.int64).max


###############################################################################
# Number theory
###############################################################################
def gcd(a: int, b: int) -> int:
    """Máximo común divisor de dos enteros ≥ 1."""
    a = require_positive_int("a", a)
    b = require_positive_int("b", b)
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    """
    Mínimo común múltiplo de dos enteros ≥ 1; lcm·gcd = a·b.

    Raises:
        LcmOverflow: Si el resultado excede int64
    """
    a = require_positive_int("a", a)
    b = require_positive_int("b", b)
    result = a // math.gcd(a, b) * b
    if result > INT64_MAX:
        raise LcmOverflow(f"LCM({a}, {b}) excede int64", "lcm", result)
    return result


###############################################################################
# Lemma-1 family (p01, p10 > 0)
###############################################################################
def _require_lemma1(config: NetworkConfig) -> None:
    if not (config.probs.p01 > 0.0 and config.probs.p10 > 0.0):
        raise PreconditionViolated(
            "La fórmula uniforme requiere p01 > 0 y p10 > 0 "
            f"(p01={config.probs.p01}, p10={config.probs.p10})",
            "probs", config.probs
        )


def lemma1_throughput(config: NetworkConfig) -> ThroughputReport:
    """
    Throughput por nodo con distribución estacionaria uniforme.

    R̄1 = log(1+γ1δ′)·[(γ2−1)(p10+p11) + p10]/(γ1γ2)
    R̄2 = log(1+γ2δ′)·[(γ1−1)(p01+p11) + p01]/(γ1γ2)

    Raises:
        PreconditionViolated: Si p01 = 0 o p10 = 0
    """
    _require_lemma1(config)
    g1, g2 = config.gammas
    probs = config.probs
    n = g1 * g2
    r1 = config.rate1 * ((g2 - 1) * probs.harvest1 + probs.p10) / n
    r2 = config.rate2 * ((g1 - 1) * probs.harvest2 + probs.p01) / n
    return ThroughputReport(r1, r2, ThroughputSource.LEMMA1)


def objective_z(config: NetworkConfig) -> float:
    """Objetivo z(γ1, γ2) = R̄1 + R̄2 bajo la fórmula uniforme."""
    return lemma1_throughput(config).total


def steady_state_uniform(config: NetworkConfig) -> np.ndarray:
    """π(i, j) = 1/(γ1γ2), el oráculo de la cadena cuando p01, p10 > 0."""
    _require_lemma1(config)
    g1, g2 = config.gammas
    return np.full((g1, g2), 1.0 / (g1 * g2))


###############################################################################
# High negative correlation (p00 = p11 = 0)
###############################################################################
def negative_corr_z(gamma1: float, gamma2: float, p: float, delta_prime: float) -> float:
    """
    z^(−) = p·log(1+γ1δ′)/γ1 + (1−p)·log(1+γ2δ′)/γ2.

    Acepta umbrales reales para el análisis de gradiente.
    """
    p = require_open_probability("p", p)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    return (
        p * math.log1p(gamma1 * delta_prime) / gamma1
        + (1.0 - p) * math.log1p(gamma2 * delta_prime) / gamma2
    )


def negative_corr_gradient(
    gamma1: float,
    gamma2: float,
    p: float,
    delta_prime: float
) -> Tuple[float, float]:
    """
    Gradiente cerrado de z^(−):

        ∂z/∂γ1 = p·(δ′γ1 − (1+δ′γ1)·log(1+γ1δ′)) / (γ1²·(1+δ′γ1))

    y análogo con (1−p) para γ2. Ambas componentes son negativas para γ > 0.
    """
    p = require_open_probability("p", p)
    delta_prime = require_positive_real("delta_prime", delta_prime)

    def _component(weight: float, g: float) -> float:
        x = g * delta_prime
        return weight * (x - (1.0 + x) * math.log1p(x)) / (g * g * (1.0 + x))

    return _component(p, gamma1), _component(1.0 - p, gamma2)


###############################################################################
# High positive correlation (p01 = p10 = 0, p11 = p)
###############################################################################
def renewal_throughput(gamma1: int, gamma2: int, p: float, delta_prime: float) -> ThroughputReport:
    """
    Throughput por renovación: cada LCM(γ1, γ2) eventos de recolección ambos
    nodos llegan a la vez a su umbral y colisionan.

        R̄n = p·(LCM/γn − 1)/LCM·log(1+γnδ′)
    """
    p = require_open_probability("p", p, allow_one=True)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    period = lcm(gamma1, gamma2)

    def _rate(g: int) -> float:
        successes = period // g - 1
        return p * successes / period * math.log1p(g * delta_prime)

    return ThroughputReport(_rate(int(gamma1)), _rate(int(gamma2)), ThroughputSource.RENEWAL)


def positive_small_delta_z(gamma1: int, gamma2: int, p: float, delta_prime: float) -> float:
    """Aproximación δ′ pequeño: z^(+) ≈ 2δ′p − GCD(γ1,γ2)·(1/γ1 + 1/γ2)·δ′p."""
    p = require_open_probability("p", p, allow_one=True)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    g = gcd(gamma1, gamma2)
    return 2.0 * delta_prime * p - g * (1.0 / gamma1 + 1.0 / gamma2) * delta_prime * p


def _require_large_delta(gamma1: int, gamma2: int, delta_prime: float) -> None:
    if gamma1 * delta_prime <= 1.0 or gamma2 * delta_prime <= 1.0:
        raise ApproximationDomain(
            f"Aproximación δ′ grande requiere γn·δ′ > 1 (γ=({gamma1},{gamma2}), δ′={delta_prime})",
            "delta_prime", delta_prime
        )


def positive_large_delta_z(gamma1: int, gamma2: int, p: float, delta_prime: float) -> float:
    """
    Aproximación δ′ grande:

        z^(+) ≈ [(γ2−G)·log(γ1δ′) + (γ1−G)·log(γ2δ′)]·p/(γ1γ2),  G = GCD(γ1, γ2)

    Raises:
        ApproximationDomain: Si γn·δ′ ≤ 1
    """
    p = require_open_probability("p", p, allow_one=True)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    _require_large_delta(gamma1, gamma2, delta_prime)
    g = gcd(gamma1, gamma2)
    return (
        (gamma2 - g) * math.log(gamma1 * delta_prime)
        + (gamma1 - g) * math.log(gamma2 * delta_prime)
    ) * p / (gamma1 * gamma2)


def large_delta_surrogate_z(gamma1: float, gamma2: float, p: float, delta_prime: float) -> float:
    """ẑ: la aproximación δ′ grande con GCD sustituido por 1 (umbrales reales)."""
    _require_large_delta(gamma1, gamma2, delta_prime)
    return (
        (gamma2 - 1.0) * math.log(gamma1 * delta_prime)
        + (gamma1 - 1.0) * math.log(gamma2 * delta_prime)
    ) * p / (gamma1 * gamma2)


def large_delta_surrogate_partial(gamma1: float, gamma2: float, p: float, delta_prime: float) -> float:
    """
    ∂ẑ/∂γ1 = p/(γ1²γ2)·[log(γ1δ′) + log(γ2δ′) − γ2·(log(γ1δ′) − 1) − 1].

    En γ2 = 1 se reduce a p·log(δ′)/γ1², positiva para δ′ > 1.
    """
    _require_large_delta(gamma1, gamma2, delta_prime)
    a = math.log(gamma1 * delta_prime)
    b = math.log(gamma2 * delta_prime)
    return p / (gamma1 ** 2 * gamma2) * (a + b - gamma2 * (a - 1.0) - 1.0)


def approx_small_report(gamma1: int, gamma2: int, p: float, delta_prime: float) -> ThroughputReport:
    """Informe por nodo con log(1+x) ≈ x (suma = positive_small_delta_z)."""
    p = require_open_probability("p", p, allow_one=True)
    g = gcd(gamma1, gamma2)
    r1 = delta_prime * p * (1.0 - g / gamma2)
    r2 = delta_prime * p * (1.0 - g / gamma1)
    return ThroughputReport(r1, r2, ThroughputSource.APPROX_SMALL)


def approx_large_report(gamma1: int, gamma2: int, p: float, delta_prime: float) -> ThroughputReport:
    """Informe por nodo con log(1+x) ≈ log(x) (suma = positive_large_delta_z)."""
    p = require_open_probability("p", p, allow_one=True)
    _require_large_delta(gamma1, gamma2, delta_prime)
    g = gcd(gamma1, gamma2)
    n = gamma1 * gamma2
    r1 = (gamma2 - g) * math.log(gamma1 * delta_prime) * p / n
    r2 = (gamma1 - g) * math.log(gamma2 * delta_prime) * p / n
    return ThroughputReport(r1, r2, ThroughputSource.APPROX_LARGE)

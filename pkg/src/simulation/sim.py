"""
Monte Carlo Simulator
Simulación slot a slot de la red de dos nodos y métricas de error (%RE, %AE)
frente a los valores analíticos.

Cada corrida es determinista dada su semilla; el paralelismo es entre
corridas independientes y los resultados pasan por un ResultCollector.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.dispatch import dispatch_throughput
from analysis.report import ThroughputReport, ThroughputSource
from network.model import BatteryState, NetworkConfig, sample_harvest, sample_harvests, step
from simulation.collector import ResultCollector
from simulation.rng import make_generator, require_seed, spawn_seeds
from utils.errors import OutOfRange, ZeroAnalyticValue
from utils.validators import require_positive_int

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 20
DEFAULT_CHUNK_SIZE = 1 << 20

SIM_CSV_COLUMNS = (
    "gamma1", "gamma2", "p00", "p10", "p01", "p11", "delta_prime", "horizon", "seed",
    "r1_sim", "r2_sim", "total_sim", "collisions", "re_total", "ae_total",
)


###############################################################################
# Domain Types
###############################################################################
@dataclass(frozen=True)
class SimulationConfig:
    """T slots, semilla de 64 bits y red a simular."""

    horizon: int
    seed: int
    network: NetworkConfig

    def __post_init__(self):
        object.__setattr__(self, "horizon", require_positive_int("horizon", self.horizon))
        object.__setattr__(self, "seed", require_seed(self.seed))


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """
    Conteos de una corrida.

    `occupancy` son frecuencias del estado previo a cada slot sobre la
    rejilla γ1×γ2; `std_error` es (σ1, σ2, σ_total) por medias por lotes
    (NaN con menos de dos lotes).
    """

    config: SimulationConfig
    report: ThroughputReport
    successes1: int
    successes2: int
    collisions: int
    occupancy: np.ndarray
    std_error: Tuple[float, float, float]


@dataclass(frozen=True)
class ErrorMetrics:
    """%RE (None si el valor analítico es 0) y %AE."""

    re_percent: Optional[float]
    ae_percent: float


@dataclass(frozen=True)
class ErrorReport:
    node1: ErrorMetrics
    node2: ErrorMetrics
    total: ErrorMetrics


@dataclass(frozen=True)
class ErrorProfileRow:
    gamma1: int
    result: SimulationResult
    analytic: ThroughputReport
    errors: ErrorReport


###############################################################################
# Error metrics
###############################################################################
def relative_error(analytic: float, simulated: float) -> float:
    """
    %RE = (analítico − simulado)/analítico·100.

    Raises:
        ZeroAnalyticValue: Si el valor analítico es 0
    """
    if analytic == 0.0:
        raise ZeroAnalyticValue("%RE indefinido con valor analítico 0", "analytic", analytic)
    return (analytic - simulated) / analytic * 100.0


def error_metrics(analytic: float, simulated: float) -> ErrorMetrics:
    """%RE y %AE; con valor analítico 0 solo %AE."""
    ae = (analytic - simulated) * 100.0
    try:
        re = relative_error(analytic, simulated)
    except ZeroAnalyticValue:
        logger.warning("Valor analítico 0: se reporta solo %AE")
        re = None
    return ErrorMetrics(re, ae)


def compare(result: SimulationResult, analytic: ThroughputReport) -> ErrorReport:
    """Errores por nodo y del total entre la simulación y el modelo."""
    sim = result.report
    return ErrorReport(
        node1=error_metrics(analytic.r1, sim.r1),
        node2=error_metrics(analytic.r2, sim.r2),
        total=error_metrics(analytic.total, sim.total)
    )


###############################################################################
# Kernel
###############################################################################
def _batch_std_error(successes: np.ndarray, lengths: np.ndarray, rate: float) -> float:
    if len(lengths) < 2:
        return math.nan
    means = successes * rate / lengths
    return float(np.std(means, ddof=1) / math.sqrt(len(lengths)))


def run(
    sim_config: SimulationConfig,
    batches: int = DEFAULT_BATCHES,
    chunk_size: int = DEFAULT_CHUNK_SIZE
) -> SimulationResult:
    """
    Simula T slots desde (0, 0).

    Con en ∈ {0, 1} y γn ≤ B̄n el tope de batería nunca actúa, así que el
    nivel previo del nodo n es (cosechas acumuladas) mod γn y el nodo
    transmite cuando su cosecha lleva la cuenta a un múltiplo de γn. Los
    uniformes se consumen en el mismo orden que run_stepwise.

    Args:
        sim_config: Horizonte, semilla y red
        batches: Lotes para el error estándar
        chunk_size: Slots generados por bloque

    Returns:
        SimulationResult con fuente `simulated`
    """
    net = sim_config.network
    horizon = sim_config.horizon
    g1, g2 = net.gammas
    nb = max(1, min(int(batches), horizon))
    rng = make_generator(sim_config.seed)

    logger.info(
        f"Simulando γ={net.gammas} δ′={net.delta_prime} T={horizon} semilla={sim_config.seed}"
    )

    occupancy = np.zeros(g1 * g2, dtype=np.int64)
    batch_s1 = np.zeros(nb)
    batch_s2 = np.zeros(nb)
    batch_len = np.zeros(nb)
    c1 = c2 = 0
    collisions = 0

    for start in range(0, horizon, chunk_size):
        n = min(chunk_size, horizon - start)
        codes = sample_harvests(net.probs, rng, n)
        e1 = (codes & 1).astype(np.int64)
        e2 = (codes >> 1).astype(np.int64)

        cum1 = c1 + np.cumsum(e1)
        cum2 = c2 + np.cumsum(e2)
        occupancy += np.bincount(((cum1 - e1) % g1) * g2 + (cum2 - e2) % g2, minlength=g1 * g2)

        tx1 = (e1 == 1) & (cum1 % g1 == 0)
        tx2 = (e2 == 1) & (cum2 % g2 == 0)
        ok1 = tx1 & ~tx2
        ok2 = tx2 & ~tx1
        collisions += int(np.count_nonzero(tx1 & tx2))

        batch_id = (np.arange(start, start + n, dtype=np.int64) * nb) // horizon
        batch_s1 += np.bincount(batch_id, weights=ok1.astype(float), minlength=nb)
        batch_s2 += np.bincount(batch_id, weights=ok2.astype(float), minlength=nb)
        batch_len += np.bincount(batch_id, minlength=nb)

        c1 = int(cum1[-1] % g1)
        c2 = int(cum2[-1] % g2)

    s1 = int(round(batch_s1.sum()))
    s2 = int(round(batch_s2.sum()))
    report = ThroughputReport(
        s1 * net.rate1 / horizon, s2 * net.rate2 / horizon, ThroughputSource.SIMULATED
    )
    se1 = _batch_std_error(batch_s1, batch_len, net.rate1)
    se2 = _batch_std_error(batch_s2, batch_len, net.rate2)
    if nb >= 2:
        totals = (batch_s1 * net.rate1 + batch_s2 * net.rate2) / batch_len
        se_total = float(np.std(totals, ddof=1) / math.sqrt(nb))
    else:
        se_total = math.nan

    logger.debug(f"Éxitos=({s1}, {s2}) colisiones={collisions} σ=({se1:.3g}, {se2:.3g})")
    return SimulationResult(
        config=sim_config,
        report=report,
        successes1=s1,
        successes2=s2,
        collisions=collisions,
        occupancy=(occupancy / horizon).reshape(g1, g2),
        std_error=(se1, se2, se_total)
    )


def run_stepwise(sim_config: SimulationConfig) -> SimulationResult:
    """
    Corrida de referencia: model.step con sample_harvest slot a slot.

    Lenta; sirve de oráculo para el kernel vectorizado en horizontes cortos.
    """
    net = sim_config.network
    rng = make_generator(sim_config.seed)
    state = BatteryState(0, 0)
    occupancy = np.zeros((net.gamma1, net.gamma2), dtype=np.int64)
    s1 = s2 = collisions = 0

    for _ in range(sim_config.horizon):
        occupancy[state.b1, state.b2] += 1
        outcome = step(state, sample_harvest(net.probs, rng), net)
        s1 += outcome.tx1 and not outcome.collision
        s2 += outcome.tx2 and not outcome.collision
        collisions += outcome.collision
        state = outcome.next_state

    horizon = sim_config.horizon
    report = ThroughputReport(
        s1 * net.rate1 / horizon, s2 * net.rate2 / horizon, ThroughputSource.SIMULATED
    )
    return SimulationResult(
        sim_config, report, int(s1), int(s2), int(collisions),
        occupancy / horizon, (math.nan, math.nan, math.nan)
    )


###############################################################################
# Batches of runs
###############################################################################
def run_many(
    configs: Sequence[SimulationConfig],
    threads: int = 1,
    batches: int = DEFAULT_BATCHES,
    chunk_size: int = DEFAULT_CHUNK_SIZE
) -> List[SimulationResult]:
    """
    Corridas independientes, en paralelo si threads > 1.

    Returns:
        Resultados en el orden de `configs`
    """
    collector = ResultCollector()
    collector.start(len(configs))

    def _one(item):
        index, config = item
        try:
            collector.add(index, run(config, batches, chunk_size))
        except Exception as e:
            collector.fail(index, str(e))
            raise

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # list() propaga la primera excepción
            list(pool.map(_one, enumerate(configs)))
    else:
        for item in enumerate(configs):
            _one(item)

    logger.info(f"{collector.get_snapshot()['done']} corridas completadas")
    return collector.results()


def error_profile(
    network: NetworkConfig,
    horizon: int,
    seed: int,
    gamma2: int = 9,
    threads: int = 1,
    batches: int = DEFAULT_BATCHES
) -> List[ErrorProfileRow]:
    """
    %RE/%AE de la simulación frente al modelo exacto con γ2 fijo y
    γ1 = 1..B̄1. Cada γ1 usa una semilla hija de `seed`.
    """
    if not 1 <= gamma2 <= network.cap2:
        raise OutOfRange(f"γ2={gamma2} fuera de [1, {network.cap2}]", "gamma2", gamma2)

    seeds = spawn_seeds(seed, network.cap1)
    configs = [
        SimulationConfig(horizon, s, network.with_gammas(g1, gamma2))
        for g1, s in zip(range(1, network.cap1 + 1), seeds)
    ]
    results = run_many(configs, threads=threads, batches=batches)

    rows = []
    for config, result in zip(configs, results):
        analytic = dispatch_throughput(config.network)
        rows.append(ErrorProfileRow(config.network.gamma1, result, analytic, compare(result, analytic)))
    return rows


def csv_row(result: SimulationResult, errors: Optional[ErrorReport] = None) -> Dict[str, object]:
    """Fila CSV de una corrida en el orden de SIM_CSV_COLUMNS."""
    net = result.config.network
    probs = net.probs
    row = {
        "gamma1": net.gamma1,
        "gamma2": net.gamma2,
        "p00": probs.p00,
        "p10": probs.p10,
        "p01": probs.p01,
        "p11": probs.p11,
        "delta_prime": net.delta_prime,
        "horizon": result.config.horizon,
        "seed": result.config.seed,
        "r1_sim": result.report.r1,
        "r2_sim": result.report.r2,
        "total_sim": result.report.total,
        "collisions": result.collisions,
        "re_total": None,
        "ae_total": None,
    }
    if errors is not None:
        row["re_total"] = errors.total.re_percent
        row["ae_total"] = errors.total.ae_percent
    return row

"""
Invariant Suite
Comprobaciones de extremo a extremo detrás de `ehnet verify`.

Cada comprobación devuelve un CheckResult; la suite falla (exit 4) si alguna
no pasa. Todo es determinista dada la semilla del RunSpec.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from analysis.analytic import lemma1_throughput, negative_corr_gradient, negative_corr_z, renewal_throughput
from analysis.optimize import (
    APPROX_SMALL,
    closed_form_negative,
    closed_form_positive_large,
    closed_form_positive_small,
    exhaustive_search,
    gcd_drop_pairs,
    objective_surface,
    verify_closed_form,
)
from network.markov import build_chain, solve_steady_state, stationary_throughput
from network.model import EHProbabilities, NetworkConfig
from simulation.rng import make_generator, spawn_seeds
from simulation.sim import SimulationConfig, compare, run, run_many

logger = logging.getLogger(__name__)

# Casos de referencia de las reglas cerradas (caps, δ′)
SMALL_DELTA_CAPS = ((4, 6), (9, 10), (5, 12))
LARGE_DELTA_CASES = (((10, 10), 30.0), ((12, 5), 50.0), ((5, 12), 50.0))


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    failures: List[str] = field(default_factory=list)


def _random_probs(rng: np.random.Generator) -> EHProbabilities:
    """Ley con p01, p10 > 0; mezcla con la uniforme para acotar cada pab ≥ 1/8."""
    mix = 0.5 * rng.dirichlet(np.ones(4)) + 0.125
    mix = mix / mix.sum()
    return EHProbabilities(*(float(x) for x in mix))


###############################################################################
# Checks
###############################################################################
def check_uniformity(network: NetworkConfig, settings: Dict[str, Any], seed: int) -> CheckResult:
    """π(i, j) = 1/(γ1γ2) cuando p01, p10 > 0, en toda la rejilla de capacidades."""
    max_gamma = settings.get("uniformity_max_gamma", 10)
    trials = settings.get("uniformity_trials", 50)
    tol = settings.get("uniformity_tolerance", 1e-9)
    rng = make_generator(seed)
    laws = [_random_probs(rng) for _ in range(trials)]

    failures = []
    worst = 0.0
    for g1 in range(1, min(network.cap1, max_gamma) + 1):
        for g2 in range(1, min(network.cap2, max_gamma) + 1):
            for probs in laws:
                config = NetworkConfig(network.cap1, network.cap2, g1, g2, network.delta_prime, probs)
                pi = solve_steady_state(build_chain(config)).pi
                dev = float(np.max(np.abs(pi - 1.0 / (g1 * g2))))
                worst = max(worst, dev)
                if dev > tol:
                    failures.append(f"γ=({g1},{g2}) probs={probs.as_dict()}: desviación {dev:.2e}")
    return CheckResult("uniformidad", not failures, f"desviación máxima {worst:.2e}", failures)


def check_simulation(network: NetworkConfig, sim: SimulationConfig, settings: Dict[str, Any],
                     threads: int, batches: int) -> CheckResult:
    """
    Fórmula uniforme frente a Monte Carlo en configuraciones aleatorias.

    Pasa si ningún nodo se aleja más de sigma_bound+1 errores estándar, como
    mucho dos quedan entre sigma_bound y sigma_bound+1, y |%RE| del total
    no supera re_bound_percent.
    """
    n_configs = settings.get("sim_configs", 20)
    sigma = settings.get("sigma_bound", 3.0)
    re_bound = settings.get("re_bound_percent", 2.0)
    seeds = spawn_seeds(sim.seed, n_configs + 1)
    rng = make_generator(seeds[0])

    configs = []
    for s in seeds[1:]:
        g1 = int(rng.integers(1, network.cap1 + 1))
        g2 = int(rng.integers(1, network.cap2 + 1))
        delta_prime = float(rng.uniform(0.1, 50.0))
        net = NetworkConfig(network.cap1, network.cap2, g1, g2, delta_prime, _random_probs(rng))
        configs.append(SimulationConfig(sim.horizon, s, net))

    results = run_many(configs, threads=threads, batches=batches)
    failures = []
    marginal = 0
    worst_re = 0.0
    for config, result in zip(configs, results):
        analytic = lemma1_throughput(config.network)
        for node, (a, s, se) in enumerate(
            zip((analytic.r1, analytic.r2), (result.report.r1, result.report.r2), result.std_error[:2]), 1
        ):
            z = abs(a - s) / se if se > 0 else (0.0 if a == s else math.inf)
            if z > sigma + 1.0:
                failures.append(f"γ={config.network.gammas} nodo {node}: {z:.2f}σ")
            elif z > sigma:
                marginal += 1
        re_total = compare(result, analytic).total.re_percent
        worst_re = max(worst_re, abs(re_total))
        if abs(re_total) > re_bound:
            failures.append(f"γ={config.network.gammas}: |%RE| total {abs(re_total):.3f}%")
    if marginal > 2:
        failures.append(f"{marginal} nodos entre {sigma}σ y {sigma + 1}σ")
    return CheckResult(
        "simulación", not failures,
        f"{n_configs} configuraciones, T={sim.horizon}, |%RE| máx {worst_re:.3f}%", failures
    )


def check_renewal_oracle(settings: Dict[str, Any], seed: int) -> CheckResult:
    """Renovación frente a la contabilidad de Markov y Monte Carlo para γ=(4,6), p=0.5, δ′=1."""
    tol = settings.get("oracle_tolerance", 1e-9)
    sigma = settings.get("sigma_bound", 3.0)
    config = NetworkConfig(4, 6, 4, 6, 1.0, EHProbabilities.high_positive(0.5))
    renewal = renewal_throughput(4, 6, 0.5, 1.0)
    markov = stationary_throughput(solve_steady_state(build_chain(config)), config)
    result = run(SimulationConfig(settings.get("sim_horizon", 1000000), seed, config))

    failures = []
    for name, a, b in (("r1", renewal.r1, markov.r1), ("r2", renewal.r2, markov.r2)):
        if abs(a - b) > tol:
            failures.append(f"{name}: renovación {a:.12g} ≠ Markov {b:.12g}")
    for name, a, s, se in (("r1", renewal.r1, result.report.r1, result.std_error[0]),
                           ("r2", renewal.r2, result.report.r2, result.std_error[1])):
        if abs(a - s) > (sigma + 1.0) * se:
            failures.append(f"{name}: simulación {s:.6g} lejos de {a:.6g} (σ={se:.2e})")
    return CheckResult("oráculo de renovación", not failures,
                       f"renovación=({renewal.r1:.6g}, {renewal.r2:.6g})", failures)


def check_closed_forms(network: NetworkConfig, threads: int) -> CheckResult:
    """Reglas cerradas frente a la búsqueda exhaustiva en sus regímenes."""
    failures = []
    caps = network.caps

    for p in (0.1, 0.5, 0.9):
        found = exhaustive_search(caps, EHProbabilities.high_negative(p), network.delta_prime, threads=threads)
        expected = closed_form_negative(caps, p, network.delta_prime)
        if found.ties != expected.ties:
            failures.append(f"negativa p={p}: exhaustiva {found.ties} ≠ {expected.ties}")

    probs = EHProbabilities.high_positive(0.5)
    for small_caps in SMALL_DELTA_CAPS:
        found = exhaustive_search(small_caps, probs, 0.04, objective=APPROX_SMALL)
        expected = closed_form_positive_small(small_caps, 0.5, 0.04)
        if found.ties != expected.ties:
            failures.append(f"δ′ pequeño caps={small_caps}: {found.ties} ≠ {expected.ties}")

    for large_caps, delta_prime in LARGE_DELTA_CASES:
        found = exhaustive_search(large_caps, probs, delta_prime)
        expected = closed_form_positive_large(large_caps, 0.5, delta_prime)
        if found.ties != expected.ties:
            failures.append(f"δ′ grande caps={large_caps}: {found.ties} ≠ {expected.ties}")

    # la configuración del usuario se informa pero no puede fallar
    if network.delta_prime > 1.0:
        check = verify_closed_form("positive-large", caps, 0.5, network.delta_prime, threads=threads)
        for note in check.notes:
            logger.warning(note)

    return CheckResult("reglas cerradas", not failures, f"caps={caps}", failures)


def check_gradient(settings: Dict[str, Any], seed: int) -> CheckResult:
    """Gradiente de z^(−) negativo en ambas coordenadas (cerrado y por diferencias)."""
    points = settings.get("gradient_points", 200)
    rng = make_generator(seed)
    h = 1e-6
    failures = []
    for _ in range(points):
        g1, g2 = (float(x) for x in rng.uniform(1.0, 50.0, 2))
        for p in (0.1, 0.5, 0.9):
            for delta_prime in (0.1, 1.0, 10.0):
                fd1 = (negative_corr_z(g1 + h, g2, p, delta_prime) - negative_corr_z(g1 - h, g2, p, delta_prime)) / (2 * h)
                fd2 = (negative_corr_z(g1, g2 + h, p, delta_prime) - negative_corr_z(g1, g2 - h, p, delta_prime)) / (2 * h)
                closed = negative_corr_gradient(g1, g2, p, delta_prime)
                if not (fd1 < 0 and fd2 < 0 and closed[0] < 0 and closed[1] < 0):
                    failures.append(f"γ=({g1:.3f},{g2:.3f}) p={p} δ′={delta_prime}")
    return CheckResult("gradiente negativo", not failures, f"{points * 9} evaluaciones", failures)


def check_gcd_drops(network: NetworkConfig, threads: int) -> CheckResult:
    """Con δ′ pequeño los pares con GCD ≥ 2 caen por debajo de un vecino coprimo."""
    surface = objective_surface(network.caps, EHProbabilities.high_positive(0.5), 0.04, threads=threads)
    report = gcd_drop_pairs(surface)
    failures = [f"γ={pair} no cae" for pair in report["violations"]]
    return CheckResult("caídas por GCD", not failures, f"{len(report['drops'])} caídas", failures)


def check_determinism(sim: SimulationConfig) -> CheckResult:
    """Misma semilla → mismo resultado bit a bit; otra semilla → distinto."""
    short = SimulationConfig(min(sim.horizon, 100000), sim.seed, sim.network)
    a, b = run(short), run(short)
    other = run(SimulationConfig(short.horizon, (sim.seed + 1) % 2 ** 64, sim.network))
    failures = []
    if (a.successes1, a.successes2, a.collisions) != (b.successes1, b.successes2, b.collisions) \
            or not np.array_equal(a.occupancy, b.occupancy):
        failures.append("dos corridas con la misma semilla difieren")
    if (a.successes1, a.successes2, a.collisions) == (other.successes1, other.successes2, other.collisions) \
            and np.array_equal(a.occupancy, other.occupancy):
        failures.append("semillas distintas producen el mismo resultado")
    return CheckResult("determinismo", not failures, f"T={short.horizon}", failures)


###############################################################################
# Suite
###############################################################################
def run_suite(spec) -> List[CheckResult]:
    """Ejecuta todas las comprobaciones y devuelve sus resultados."""
    settings = dict(spec.settings.get("verify", {}))
    settings["sim_horizon"] = spec.sim.horizon
    seeds = spawn_seeds(spec.sim.seed, 4)

    checks: List[Callable[[], CheckResult]] = [
        lambda: check_uniformity(spec.network, settings, seeds[0]),
        lambda: check_simulation(spec.network, spec.sim, settings, spec.threads, spec.batches),
        lambda: check_renewal_oracle(settings, seeds[1]),
        lambda: check_closed_forms(spec.network, spec.threads),
        lambda: check_gradient(settings, seeds[2]),
        lambda: check_gcd_drops(spec.network, spec.threads),
        lambda: check_determinism(spec.sim),
    ]

    results = []
    for check in checks:
        result = check()
        results.append(result)
        if result.passed:
            logger.info(f"✓ {result.name}: {result.detail}")
        else:
            logger.error(f"✗ {result.name}: {result.detail}; {len(result.failures)} fallos")
            for failure in result.failures[:10]:
                logger.error(f"    {failure}")
    return results

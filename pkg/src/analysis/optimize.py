"""
Threshold Optimization
Búsqueda exhaustiva de (γ1, γ2) en [1, B̄1]×[1, B̄2] y reglas cerradas de
los regímenes de correlación alta, cada una contrastable con la búsqueda.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from analysis.analytic import (
    approx_large_report,
    approx_small_report,
    negative_corr_z,
    positive_large_delta_z,
    positive_small_delta_z,
)
from analysis.dispatch import ModelKind, dispatch_throughput, select_model
from analysis.report import ThroughputReport
from network.model import EHProbabilities, NetworkConfig
from utils.errors import AmbiguousCase, ApproximationDomain, OutOfRange, PreconditionViolated, ValidationError
from utils.validators import require_open_probability, require_positive_int, require_positive_real

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12

Pair = Tuple[int, int]

# Objetivos aceptados por la búsqueda
EXACT = "exact"
APPROX_SMALL = "approx-small-delta"
APPROX_LARGE = "approx-large-delta"
OBJECTIVES = (EXACT, APPROX_SMALL, APPROX_LARGE)


###############################################################################
# Domain Types
###############################################################################
@dataclass(frozen=True)
class SurfacePoint:
    """Un punto de la superficie del objetivo."""

    gamma1: int
    gamma2: int
    r1: float
    r2: float
    total: float
    model_used: str

    @property
    def pair(self) -> Pair:
        return self.gamma1, self.gamma2


@dataclass(frozen=True)
class OptimizationOutcome:
    """Óptimo con el conjunto completo de empates."""

    best: Pair
    best_value: float
    ties: List[Pair]
    evaluated: int
    model_used: str

    def __post_init__(self):
        if self.best not in self.ties:
            raise ValidationError(f"best {self.best} no está en ties {self.ties}", "best", self.best)


@dataclass(frozen=True)
class ClosedFormCheck:
    """Regla cerrada frente a la búsqueda exhaustiva (exacta y aproximada)."""

    kind: str
    exact: OptimizationOutcome
    closed: Optional[OptimizationOutcome] = None
    approx: Optional[OptimizationOutcome] = None
    reason: Optional[str] = None
    gap_exact: float = math.nan
    agrees_exact: bool = False
    agrees_approx: Optional[bool] = None
    notes: List[str] = field(default_factory=list)


###############################################################################
# Helpers
###############################################################################
def _validate_caps(caps: Sequence[int]) -> Pair:
    if len(caps) != 2:
        raise PreconditionViolated(f"Se esperan dos capacidades, recibido {caps!r}", "caps", caps)
    return require_positive_int("cap1", caps[0]), require_positive_int("cap2", caps[1])


def _axis_range(name: str, bounds: Optional[Sequence[int]], cap: int) -> Pair:
    if bounds is None:
        return 1, cap
    lo, hi = int(bounds[0]), int(bounds[1])
    if not 1 <= lo <= hi <= cap:
        raise OutOfRange(f"{name}: rango {lo}:{hi} fuera de [1, {cap}]", name, tuple(bounds))
    return lo, hi


def _positive_p(probs: EHProbabilities) -> float:
    """p11 del régimen de correlación positiva (p01 = p10 = 0)."""
    if probs.p01 != 0.0 or probs.p10 != 0.0 or probs.p11 <= 0.0:
        raise PreconditionViolated(
            "Las aproximaciones requieren p01 = p10 = 0 y p11 > 0", "probs", probs
        )
    return probs.p11


def _evaluator(
    caps: Pair,
    probs: EHProbabilities,
    delta_prime: float,
    objective: str
) -> Tuple[Callable[[int, int], ThroughputReport], str]:
    """Función (γ1, γ2) → informe y su etiqueta de modelo."""
    if objective == EXACT:
        model = select_model(probs)

        def _exact(g1: int, g2: int) -> ThroughputReport:
            config = NetworkConfig(caps[0], caps[1], g1, g2, delta_prime, probs)
            return dispatch_throughput(config, model)

        return _exact, model.value

    p = _positive_p(probs)
    if objective == APPROX_SMALL:
        return (lambda g1, g2: approx_small_report(g1, g2, p, delta_prime)), APPROX_SMALL
    if objective == APPROX_LARGE:
        if delta_prime <= 1.0:
            raise ApproximationDomain(
                f"δ′={delta_prime} ≤ 1: γ=1 queda fuera del dominio", "delta_prime", delta_prime
            )
        return (lambda g1, g2: approx_large_report(g1, g2, p, delta_prime)), APPROX_LARGE
    raise PreconditionViolated(f"Objetivo desconocido: {objective!r}", "objective", objective)


def reduce_argmax(points: Sequence[SurfacePoint], tie_tolerance: float = TIE_TOLERANCE) -> OptimizationOutcome:
    """Máximo con empates dentro de `tie_tolerance`; `best` es el primer empate lexicográfico."""
    if not points:
        raise PreconditionViolated("Superficie vacía", "surface")
    best_value = max(pt.total for pt in points)
    ties = sorted(pt.pair for pt in points if pt.total >= best_value - tie_tolerance)
    return OptimizationOutcome(
        best=ties[0],
        best_value=best_value,
        ties=ties,
        evaluated=len(points),
        model_used=points[0].model_used
    )


###############################################################################
# Operations
###############################################################################
def objective_surface(
    caps: Sequence[int],
    probs: EHProbabilities,
    delta_prime: float,
    objective: str = EXACT,
    threads: int = 1,
    gamma1_range: Optional[Pair] = None,
    gamma2_range: Optional[Pair] = None
) -> List[SurfacePoint]:
    """
    Evalúa el throughput en la rejilla [1, B̄1]×[1, B̄2] o en la subrejilla pedida.

    Args:
        caps: (B̄1, B̄2)
        probs: Ley de recolección
        delta_prime: δ′
        objective: exact | approx-small-delta | approx-large-delta
        threads: Hilos para evaluar la rejilla
        gamma1_range: (lo, hi) inclusivo para γ1 (default: 1..B̄1)
        gamma2_range: (lo, hi) inclusivo para γ2 (default: 1..B̄2)

    Returns:
        Puntos en orden (γ1, γ2) lexicográfico
    """
    caps = _validate_caps(caps)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    evaluate, model_used = _evaluator(caps, probs, delta_prime, objective)
    lo1, hi1 = _axis_range("gamma1_range", gamma1_range, caps[0])
    lo2, hi2 = _axis_range("gamma2_range", gamma2_range, caps[1])
    grid = [(g1, g2) for g1 in range(lo1, hi1 + 1) for g2 in range(lo2, hi2 + 1)]

    def _point(pair: Pair) -> SurfacePoint:
        report = evaluate(*pair)
        return SurfacePoint(pair[0], pair[1], report.r1, report.r2, report.total, model_used)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(_point, grid))
    else:
        points = [_point(pair) for pair in grid]

    logger.debug(f"Superficie γ1∈[{lo1},{hi1}] γ2∈[{lo2},{hi2}] evaluada con {model_used} (δ′={delta_prime})")
    return points


def exhaustive_search(
    caps: Sequence[int],
    probs: EHProbabilities,
    delta_prime: float,
    objective: str = EXACT,
    tie_tolerance: float = TIE_TOLERANCE,
    threads: int = 1
) -> OptimizationOutcome:
    """
    Resuelve el programa entero evaluando todos los pares (γ1, γ2).

    El modelo exacto se elige por el patrón de probabilidades (lemma1,
    renewal o contabilidad de Markov); `objective` permite buscar sobre
    las aproximaciones de δ′ pequeño o grande.
    """
    points = objective_surface(caps, probs, delta_prime, objective, threads)
    outcome = reduce_argmax(points, tie_tolerance)
    logger.info(
        f"Búsqueda exhaustiva ({outcome.model_used}): óptimo {outcome.best} "
        f"z={outcome.best_value:.6g}, empates={outcome.ties}"
    )
    return outcome


def closed_form_negative(caps: Sequence[int], p: float, delta_prime: float) -> OptimizationOutcome:
    """Correlación negativa alta: cada nodo transmite con una sola unidad, γ* = (1, 1)."""
    _validate_caps(caps)
    p = require_open_probability("p", p)
    value = negative_corr_z(1, 1, p, delta_prime)
    return OptimizationOutcome((1, 1), value, [(1, 1)], 1, ModelKind.LEMMA1.value)


def largest_coprime(limit: int, with_value: int) -> int:
    """Mayor j ≤ limit con GCD(with_value, j) = 1 (j = 1 siempre vale)."""
    for j in range(limit, 0, -1):
        if math.gcd(with_value, j) == 1:
            return j
    return 1


def closed_form_positive_small(caps: Sequence[int], p: float, delta_prime: float) -> OptimizationOutcome:
    """
    Correlación positiva alta, δ′ pequeño: umbrales tan grandes como sea
    posible con GCD = 1. El nodo de menor capacidad toma su capacidad C_s;
    el otro el mayor j ≤ C_l coprimo con C_s.

    Raises:
        AmbiguousCase: Si B̄1 = B̄2 (usar exhaustive_search)
    """
    cap1, cap2 = _validate_caps(caps)
    p = require_open_probability("p", p, allow_one=True)
    if cap1 == cap2:
        raise AmbiguousCase(f"Capacidades iguales ({cap1}); usar búsqueda exhaustiva", "caps", caps)

    if cap1 < cap2:
        best = (cap1, largest_coprime(cap2, cap1))
    else:
        best = (largest_coprime(cap1, cap2), cap2)
    value = positive_small_delta_z(best[0], best[1], p, delta_prime)
    return OptimizationOutcome(best, value, [best], 1, APPROX_SMALL)


def closed_form_positive_large(caps: Sequence[int], p: float, delta_prime: float) -> OptimizationOutcome:
    """
    Correlación positiva alta, δ′ grande: un nodo transmite mensajes cortos
    (γ = 1) y el otro usa toda su capacidad. Capacidades iguales → dos empates.

    Raises:
        ApproximationDomain: Si δ′ ≤ 1 (γδ′ ≤ 1 en parte de la rejilla)
    """
    cap1, cap2 = _validate_caps(caps)
    p = require_open_probability("p", p, allow_one=True)
    delta_prime = require_positive_real("delta_prime", delta_prime)
    if delta_prime <= 1.0:
        raise ApproximationDomain(f"δ′={delta_prime} ≤ 1 fuera del régimen de δ′ grande", "delta_prime", delta_prime)

    if cap1 > cap2:
        ties = [(cap1, 1)]
    elif cap2 > cap1:
        ties = [(1, cap2)]
    else:
        ties = sorted({(1, cap2), (cap1, 1)})
    value = positive_large_delta_z(ties[0][0], ties[0][1], p, delta_prime)
    return OptimizationOutcome(ties[0], value, ties, len(ties), APPROX_LARGE)


###############################################################################
# Cross-checks
###############################################################################
def verify_closed_form(
    kind: str,
    caps: Sequence[int],
    p: float,
    delta_prime: float,
    threads: int = 1
) -> ClosedFormCheck:
    """
    Contrasta una regla cerrada con la búsqueda exhaustiva.

    Args:
        kind: negative | positive-small | positive-large
        caps: (B̄1, B̄2)
        p: Parámetro del régimen
        delta_prime: δ′

    Returns:
        ClosedFormCheck; los desacuerdos se reportan, no se lanzan
    """
    if kind == "negative":
        probs = EHProbabilities.high_negative(p)
        rule, approx_objective = closed_form_negative, None
    elif kind == "positive-small":
        probs = EHProbabilities.high_positive(p)
        rule, approx_objective = closed_form_positive_small, APPROX_SMALL
    elif kind == "positive-large":
        probs = EHProbabilities.high_positive(p)
        rule, approx_objective = closed_form_positive_large, APPROX_LARGE
    else:
        raise PreconditionViolated(f"Regla desconocida: {kind!r}", "kind", kind)

    exact = exhaustive_search(caps, probs, delta_prime, threads=threads)
    surface = {pt.pair: pt.total for pt in objective_surface(caps, probs, delta_prime, threads=threads)}

    try:
        closed = rule(caps, p, delta_prime)
    except (AmbiguousCase, ApproximationDomain) as e:
        logger.warning(f"Regla {kind} no aplicable: {e}")
        return ClosedFormCheck(kind=kind, exact=exact, reason=str(e))

    approx = None
    agrees_approx = None
    if approx_objective is not None:
        approx = exhaustive_search(caps, probs, delta_prime, objective=approx_objective, threads=threads)
        agrees_approx = set(closed.ties) == set(approx.ties)

    agrees_exact = set(closed.ties) == set(exact.ties)
    gap = exact.best_value - max(surface[pair] for pair in closed.ties)
    notes = []
    if not agrees_exact:
        notes.append(
            f"exacto {exact.ties} ≠ cerrado {closed.ties} (brecha {gap:.3e}); "
            f"regla derivada para δ′ asintótico"
        )
        logger.warning(f"Regla {kind} caps={tuple(caps)} δ′={delta_prime}: {notes[-1]}")

    return ClosedFormCheck(
        kind=kind,
        exact=exact,
        closed=closed,
        approx=approx,
        gap_exact=gap,
        agrees_exact=agrees_exact,
        agrees_approx=agrees_approx,
        notes=notes
    )


def gcd_drop_pairs(points: Sequence[SurfacePoint]) -> Dict[str, List[Pair]]:
    """
    Firma de la superficie de δ′ pequeño: pares con GCD ≥ 2 frente a sus
    vecinos coprimos (±1 en una coordenada).

    Returns:
        {"drops": pares por debajo de algún vecino coprimo,
         "violations": pares con vecino coprimo y ninguno estrictamente mayor}
    """
    values = {pt.pair: pt.total for pt in points}
    drops: List[Pair] = []
    violations: List[Pair] = []
    for (g1, g2), value in sorted(values.items()):
        if math.gcd(g1, g2) < 2:
            continue
        neighbours = [
            values[nb] for nb in ((g1 - 1, g2), (g1 + 1, g2), (g1, g2 - 1), (g1, g2 + 1))
            if nb in values and math.gcd(*nb) == 1
        ]
        if not neighbours:
            continue
        if max(neighbours) > value:
            drops.append((g1, g2))
        else:
            violations.append((g1, g2))
    return {"drops": drops, "violations": violations}

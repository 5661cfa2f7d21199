"""
Joint Battery DTMC
Cadena de Markov γ1×γ2 de las baterías, su distribución estacionaria y la
contabilidad de throughput por estado.

Índice de estado row-major: s = i·γ2 + j para (B1, B2) = (i, j).
"""

import csv
import math
import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from analysis.report import ThroughputReport, ThroughputSource
from network.model import EHProbabilities, NetworkConfig
from utils.errors import DimensionMismatch, NoConvergence, ValidationError

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-12
DISTRIBUTION_TOLERANCE = 1e-10
SUPPORT_TOLERANCE = 1e-12


###############################################################################
# Domain Types
###############################################################################
@dataclass(frozen=True)
class TransitionMatrix:
    """Matriz fila-estocástica de la cadena conjunta."""

    gamma1: int
    gamma2: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        dim = self.gamma1 * self.gamma2
        if entries.shape != (dim, dim):
            raise DimensionMismatch(
                f"Matriz {entries.shape} para γ=({self.gamma1},{self.gamma2})", "entries"
            )
        if np.any(entries < 0.0) or np.any(entries > 1.0 + ROW_SUM_TOLERANCE):
            raise ValidationError("Entradas fuera de [0, 1]", "entries")
        row_error = np.max(np.abs(entries.sum(axis=1) - 1.0))
        if row_error > ROW_SUM_TOLERANCE:
            raise ValidationError(f"Filas no suman 1 (error {row_error:.3e})", "entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.gamma1 * self.gamma2


@dataclass(frozen=True)
class ChainStructure:
    """Estructura de grafo de la cadena vista desde (0, 0)."""

    reachable: np.ndarray
    irreducible: bool
    period: int


@dataclass(frozen=True)
class SteadyState:
    """π(i, j) = Pr{B1 = i, B2 = j} como matriz γ1×γ2."""

    pi: np.ndarray
    method: str = "linear"
    residual: float = 0.0
    iterations: int = 0

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.ndim != 2:
            raise DimensionMismatch(f"π debe ser 2-D, recibido {pi.shape}", "pi")
        if np.any(pi < 0.0) or abs(pi.sum() - 1.0) > DISTRIBUTION_TOLERANCE:
            raise ValidationError(f"π no es una distribución (suma {pi.sum()!r})", "pi")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @property
    def support_mask(self) -> np.ndarray:
        return self.pi > SUPPORT_TOLERANCE

    @property
    def shape(self):
        return self.pi.shape

    def flat(self) -> np.ndarray:
        return self.pi.reshape(-1)


###############################################################################
# Operations
###############################################################################
def build_chain(config: NetworkConfig) -> TransitionMatrix:
    """
    Construye la matriz de transición.

    Desde (i, j): p00 se queda; p10 va a (w1(i+1), j); p01 a (i, w2(j+1));
    p11 a (w1(i+1), w2(j+1)), con wn(x) = 0 si x ≥ γn (transmisión).
    """
    g1, g2 = config.gamma1, config.gamma2
    n = g1 * g2
    probs = config.probs

    states = np.arange(n)
    i, j = np.divmod(states, g2)
    i_next = np.where(i + 1 >= g1, 0, i + 1)
    j_next = np.where(j + 1 >= g2, 0, j + 1)

    entries = np.zeros((n, n))
    # np.add.at acumula cuando destinos coinciden (γn = 1)
    np.add.at(entries, (states, states), probs.p00)
    np.add.at(entries, (states, i_next * g2 + j), probs.p10)
    np.add.at(entries, (states, i * g2 + j_next), probs.p01)
    np.add.at(entries, (states, i_next * g2 + j_next), probs.p11)

    logger.debug(f"Cadena construida: γ=({g1},{g2}), {n} estados")
    return TransitionMatrix(g1, g2, entries)


def chain_structure(P: TransitionMatrix) -> ChainStructure:
    """Alcanzables desde (0, 0), irreducibilidad y período de la clase alcanzada."""
    graph = csr_matrix((P.entries > 0.0).astype(float))
    order = breadth_first_order(graph, 0, directed=True, return_predecessors=False)
    reachable = np.zeros(P.dim, dtype=bool)
    reachable[order] = True

    n_components, _ = connected_components(graph, directed=True, connection='strong')

    # período: gcd de level[u] + 1 - level[v] sobre las aristas alcanzables
    level = np.full(P.dim, -1)
    level[0] = 0
    queue = deque([0])
    period = 0
    while queue:
        u = queue.popleft()
        for v in graph.indices[graph.indptr[u]:graph.indptr[u + 1]]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                period = math.gcd(period, abs(int(level[u]) + 1 - int(level[v])))

    return ChainStructure(reachable=reachable, irreducible=n_components == 1, period=max(period, 1))


def _residual(P: np.ndarray, x: np.ndarray) -> float:
    return float(np.max(np.abs(x @ P - x)))


def _solve_linear(P: np.ndarray) -> np.ndarray:
    """Resuelve π(P − I) = 0 con Σπ = 1 sustituyendo la última ecuación."""
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    x = scipy.linalg.solve(A, b)
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def _cesaro_power(P: np.ndarray, period: int, tol: float, max_iter: int):
    """Potencias desde la masa puntual en (0, 0), promediando la última ventana de un período."""
    n = P.shape[0]
    x = np.zeros(n)
    x[0] = 1.0
    window = deque([x], maxlen=period)
    window_sum = x.copy()
    avg = x
    for k in range(1, max_iter + 1):
        x = x @ P
        if len(window) == period:
            window_sum -= window[0]
        window.append(x)
        window_sum += x
        if len(window) < period:
            continue
        avg = window_sum / period
        residual = _residual(P, avg)
        if residual <= tol:
            return avg, residual, k
    return avg, _residual(P, avg), max_iter


def solve_steady_state(
    P: TransitionMatrix,
    tol: float = 1e-12,
    max_iter: int = 200000
) -> SteadyState:
    """
    Distribución estacionaria que representa la ocupación media desde (0, 0).

    Cadena irreducible: sistema lineal. Reducible (p. ej. p01 = p10 = 0):
    potencias desde (0, 0) con promedio de Cesàro sobre un período.

    Raises:
        NoConvergence: Si el residuo ‖πP − π‖∞ no baja de `tol`
    """
    structure = chain_structure(P)
    entries = P.entries

    if structure.irreducible:
        x = _solve_linear(entries)
        method, iterations = "linear", 0
        residual = _residual(entries, x)
    else:
        x, residual, iterations = _cesaro_power(entries, structure.period, tol, max_iter)
        method = "cesaro"
        if residual > tol:
            x, residual, method = _restricted_fallback(entries, structure, residual, iterations)

    if residual > tol:
        raise NoConvergence(
            f"Residuo {residual:.3e} > {tol:.1e} (método {method})",
            residual=residual,
            iterations=iterations
        )

    logger.debug(
        f"π resuelto por {method}: residuo={residual:.2e}, iteraciones={iterations}, "
        f"período={structure.period}, soporte={int(np.count_nonzero(x > SUPPORT_TOLERANCE))}/{P.dim}"
    )
    return SteadyState(
        pi=x.reshape(P.gamma1, P.gamma2),
        method=method,
        residual=residual,
        iterations=iterations
    )


def _restricted_fallback(entries: np.ndarray, structure: ChainStructure, residual: float, iterations: int):
    """
    Cesàro lento (cadena casi periódica): si lo alcanzado desde (0, 0) es una
    única clase cerrada, su vector estacionario es el límite de Cesàro.
    """
    idx = np.flatnonzero(structure.reachable)
    sub = entries[np.ix_(idx, idx)]
    closed = np.allclose(sub.sum(axis=1), 1.0, atol=ROW_SUM_TOLERANCE)
    n_components, _ = connected_components(csr_matrix((sub > 0.0).astype(float)), directed=True, connection='strong')
    if not (closed and n_components == 1):
        return None, residual, "cesaro"

    logger.warning(
        f"Cesàro sin converger tras {iterations} iteraciones (residuo {residual:.2e}); "
        f"se resuelve la clase alcanzada ({idx.size} estados)"
    )
    x = np.zeros(entries.shape[0])
    x[idx] = _solve_linear(sub)
    return x, _residual(entries, x), "restricted-linear"


def stationary_throughput(steady: SteadyState, config: NetworkConfig) -> ThroughputReport:
    """
    Throughput medio contando transmisiones exitosas estado a estado.

    R̄1 = log(1+γ1δ′)·[(p10+p11)·Σ_{j<γ2−1} π(γ1−1, j) + p10·π(γ1−1, γ2−1)],
    simétrico para R̄2. Vale para cualquier π estacionaria.

    Raises:
        DimensionMismatch: Si π no es γ1×γ2
    """
    g1, g2 = config.gammas
    if steady.shape != (g1, g2):
        raise DimensionMismatch(f"π {steady.shape} no coincide con γ=({g1},{g2})", "pi", steady.shape)

    pi = steady.pi
    probs = config.probs
    corner = pi[g1 - 1, g2 - 1]

    r1 = config.rate1 * (probs.harvest1 * pi[g1 - 1, :g2 - 1].sum() + probs.p10 * corner)
    r2 = config.rate2 * (probs.harvest2 * pi[:g1 - 1, g2 - 1].sum() + probs.p01 * corner)
    return ThroughputReport(max(r1, 0.0), max(r2, 0.0), ThroughputSource.STATIONARY)


def balance_residuals(steady: SteadyState, probs: EHProbabilities) -> Dict[str, float]:
    """
    Residuo máximo de cada familia de ecuaciones de balance:

        π(i,j)(1−p00) = π(i−1,j−1)p11 + π(i−1,j)p10 + π(i,j−1)p01

    con índices cíclicos; familias: interior (i,j ≥ 1), columna j = 0 con
    i ≥ 1, fila i = 0 con j ≥ 1, y esquina (0, 0).
    """
    pi = steady.pi
    lhs = pi * (1.0 - probs.p00)
    rhs = (
        np.roll(pi, (1, 1), axis=(0, 1)) * probs.p11
        + np.roll(pi, 1, axis=0) * probs.p10
        + np.roll(pi, 1, axis=1) * probs.p01
    )
    err = np.abs(lhs - rhs)

    def _max(block: np.ndarray) -> float:
        return float(block.max()) if block.size else 0.0

    return {
        "interior": _max(err[1:, 1:]),
        "edge_i": _max(err[1:, :1]),
        "edge_j": _max(err[:1, 1:]),
        "corner": float(err[0, 0])
    }


def dump_csv(P: TransitionMatrix, path: Path, include_zeros: bool = False) -> Path:
    """Vuelca la matriz como (row, column, probability) para depuración."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(["row", "column", "probability"])
        for r in range(P.dim):
            for c in range(P.dim):
                value = P.entries[r, c]
                if include_zeros or value > 0.0:
                    writer.writerow([r, c, repr(float(value))])
    logger.info(f"Matriz de transición volcada en {path}")
    return path


def steady_state_for(config: NetworkConfig, tol: float = 1e-12, max_iter: int = 200000,
                     chain: Optional[TransitionMatrix] = None) -> SteadyState:
    """Atajo: build_chain + solve_steady_state."""
    return solve_steady_state(chain or build_chain(config), tol=tol, max_iter=max_iter)

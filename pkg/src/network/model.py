"""
Network Model
Tipos de dominio y dinámica exacta de un slot de la red de dos nodos EH.

Las baterías se cuentan en unidades enteras de δ. En cada slot cada nodo
recoge 0 o 1 unidad según la ley conjunta (p00, p10, p01, p11); el nodo que
alcanza su umbral γn transmite en el mismo slot y vacía la batería. Si
ambos transmiten a la vez hay colisión y se pierden los dos paquetes.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Tuple

import numpy as np

from utils.errors import InvalidState, NonStochastic, OutOfRange
from utils.validators import require_positive_int, require_positive_real, validate_probability

logger = logging.getLogger(__name__)

# Tolerancia de la suma p00+p10+p01+p11
STOCHASTIC_TOLERANCE = 1e-12

# Orden de los resultados conjuntos (e1, e2); coincide con el orden de campos
HARVEST_OUTCOMES: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


###############################################################################
# Domain Types
###############################################################################
@dataclass(frozen=True)
class EHProbabilities:
    """Ley conjunta de recolección: p_ab = Pr{E1 = a·δ, E2 = b·δ}."""

    p00: float
    p10: float
    p01: float
    p11: float

    @classmethod
    def independent(cls) -> "EHProbabilities":
        return cls(0.25, 0.25, 0.25, 0.25)

    @classmethod
    def high_negative(cls, p: float = 0.5) -> "EHProbabilities":
        """Exactamente un nodo recolecta por evento (p00 = p11 = 0)."""
        return cls(0.0, p, 1.0 - p, 0.0)

    @classmethod
    def high_positive(cls, p: float = 0.5) -> "EHProbabilities":
        """Ambos recolectan juntos o ninguno (p01 = p10 = 0)."""
        return cls(1.0 - p, 0.0, 0.0, p)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EHProbabilities":
        try:
            return cls(*(float(data[k]) for k in ("p00", "p10", "p01", "p11")))
        except KeyError as e:
            raise OutOfRange(f"Falta la probabilidad {e.args[0]}", e.args[0]) from None

    def as_array(self) -> np.ndarray:
        """Vector [p00, p10, p01, p11] (orden de HARVEST_OUTCOMES)."""
        return np.array([self.p00, self.p10, self.p01, self.p11], dtype=float)

    def as_dict(self) -> Dict[str, float]:
        return {"p00": self.p00, "p10": self.p10, "p01": self.p01, "p11": self.p11}

    @property
    def harvest1(self) -> float:
        """Probabilidad de que el nodo 1 recolecte en un slot."""
        return self.p10 + self.p11

    @property
    def harvest2(self) -> float:
        return self.p01 + self.p11


@dataclass(frozen=True)
class NetworkConfig:
    """Capacidades B̄n, umbrales γn, δ′ y ley de recolección."""

    cap1: int
    cap2: int
    gamma1: int
    gamma2: int
    delta_prime: float
    probs: EHProbabilities

    def __post_init__(self):
        cap1 = require_positive_int("cap1", self.cap1)
        cap2 = require_positive_int("cap2", self.cap2)
        gamma1 = require_positive_int("gamma1", self.gamma1, max_val=cap1)
        gamma2 = require_positive_int("gamma2", self.gamma2, max_val=cap2)
        delta_prime = require_positive_real("delta_prime", self.delta_prime)
        validate(self.probs)
        # normaliza tipos (numpy ints, strings numéricos)
        object.__setattr__(self, "cap1", cap1)
        object.__setattr__(self, "cap2", cap2)
        object.__setattr__(self, "gamma1", gamma1)
        object.__setattr__(self, "gamma2", gamma2)
        object.__setattr__(self, "delta_prime", delta_prime)

    @property
    def caps(self) -> Tuple[int, int]:
        return self.cap1, self.cap2

    @property
    def gammas(self) -> Tuple[int, int]:
        return self.gamma1, self.gamma2

    @property
    def rate1(self) -> float:
        """Tasa de una transmisión exitosa del nodo 1: log(1 + γ1·δ′) nats/s/Hz."""
        return math.log1p(self.gamma1 * self.delta_prime)

    @property
    def rate2(self) -> float:
        return math.log1p(self.gamma2 * self.delta_prime)

    @property
    def num_states(self) -> int:
        return self.gamma1 * self.gamma2

    def with_gammas(self, gamma1: int, gamma2: int) -> "NetworkConfig":
        """Copia con otros umbrales (valida 1 ≤ γn ≤ B̄n)."""
        return replace(self, gamma1=gamma1, gamma2=gamma2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkConfig":
        """Construye desde la sección `network` del config JSON."""
        caps = data.get("caps", [None, None])
        gammas = data.get("gammas", caps)
        return cls(
            cap1=caps[0],
            cap2=caps[1],
            gamma1=gammas[0],
            gamma2=gammas[1],
            delta_prime=data.get("delta_prime"),
            probs=EHProbabilities.from_dict(data.get("probs", {}))
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "caps": [self.cap1, self.cap2],
            "gammas": [self.gamma1, self.gamma2],
            "delta_prime": self.delta_prime,
            "probs": self.probs.as_dict()
        }


@dataclass(frozen=True)
class BatteryState:
    """Niveles de batería B1(t), B2(t) en unidades de δ."""

    b1: int
    b2: int

    def index(self, gamma2: int) -> int:
        """Índice row-major s = b1·γ2 + b2."""
        return self.b1 * gamma2 + self.b2

    @classmethod
    def from_index(cls, s: int, gamma2: int) -> "BatteryState":
        return cls(*divmod(int(s), gamma2))


@dataclass(frozen=True)
class SlotOutcome:
    """Resultado de un slot: estado siguiente, transmisiones y tasas."""

    next_state: BatteryState
    tx1: bool
    tx2: bool
    collision: bool
    rate1: float
    rate2: float


###############################################################################
# Operations
###############################################################################
def validate(probs: EHProbabilities) -> None:
    """
    Valida la ley conjunta de recolección.

    Raises:
        OutOfRange: Si algún campo está fuera de [0, 1]
        NonStochastic: Si la suma difiere de 1 en más de 1e-12
    """
    for name, value in probs.as_dict().items():
        if not validate_probability(value):
            raise OutOfRange(f"{name}={value!r} fuera de [0, 1]", name, value)

    total = math.fsum(probs.as_dict().values())
    if abs(total - 1.0) > STOCHASTIC_TOLERANCE:
        raise NonStochastic(f"p00+p10+p01+p11 = {total!r} ≠ 1", "probs", total)


def compute_delta_prime(delta: float, epsilon: float, noise: float) -> float:
    """
    δ′ = (δ/ε)/N: SNR por unidad de energía.

    Args:
        delta: Energía por unidad recolectada (J)
        epsilon: Fracción del slot que dura una transmisión
        noise: Potencia de ruido N

    Raises:
        NonPositiveInput: Si alguna entrada no es > 0
    """
    delta = require_positive_real("delta", delta)
    epsilon = require_positive_real("epsilon", epsilon)
    noise = require_positive_real("noise", noise)
    return (delta / epsilon) / noise


def _cumulative(probs: EHProbabilities) -> np.ndarray:
    cum = np.cumsum(probs.as_array())
    cum[-1] = 1.0
    return cum


def sample_harvest(probs: EHProbabilities, rng: np.random.Generator) -> Tuple[int, int]:
    """
    Muestrea un resultado conjunto (e1, e2) con Pr{(a, b)} = p_ab.

    Consume exactamente un uniforme del generador.
    """
    k = int(np.searchsorted(_cumulative(probs), rng.random(), side='right'))
    return HARVEST_OUTCOMES[k]


def sample_harvests(probs: EHProbabilities, rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Versión vectorizada de sample_harvest.

    Returns:
        Array uint8 de códigos k ∈ {0..3}; e1 = k & 1, e2 = k >> 1
    """
    u = rng.random(size)
    return np.searchsorted(_cumulative(probs), u, side='right').astype(np.uint8)


def advance_level(level: int, harvest: int, gamma: int, cap: int) -> Tuple[int, bool]:
    """
    Evolución de una batería en un slot.

    Returns:
        (nivel siguiente, transmitió)
    """
    candidate = min(cap, level + harvest)
    if candidate >= gamma:
        return 0, True
    return candidate, False


def step(
    state: BatteryState,
    harvest: Tuple[int, int],
    config: NetworkConfig
) -> SlotOutcome:
    """
    Aplica un slot: recolección, comprobación de umbral y transmisión.

    Args:
        state: Niveles al inicio del slot (0 ≤ bn ≤ γn − 1)
        harvest: (e1, e2) con en ∈ {0, 1}
        config: Configuración de la red

    Returns:
        SlotOutcome del slot

    Raises:
        InvalidState: Si el estado o la recolección violan sus invariantes
    """
    if not (0 <= state.b1 < config.gamma1 and 0 <= state.b2 < config.gamma2):
        raise InvalidState(
            f"Estado {state} fuera de la rejilla γ=({config.gamma1},{config.gamma2})",
            "state", state
        )
    e1, e2 = harvest
    if e1 not in (0, 1) or e2 not in (0, 1):
        raise InvalidState(f"Recolección inválida: {harvest}", "harvest", harvest)

    b1, tx1 = advance_level(state.b1, e1, config.gamma1, config.cap1)
    b2, tx2 = advance_level(state.b2, e2, config.gamma2, config.cap2)
    collision = tx1 and tx2

    return SlotOutcome(
        next_state=BatteryState(b1, b2),
        tx1=tx1,
        tx2=tx2,
        collision=collision,
        rate1=config.rate1 if tx1 and not collision else 0.0,
        rate2=config.rate2 if tx2 and not collision else 0.0
    )

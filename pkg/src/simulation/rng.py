"""
Generador aleatorio reproducible.

PCG64 sembrado con SeedSequence(seed). Regla de reparto: una corrida por
hijo de SeedSequence(base).spawn(n); la semilla de cada hijo es su primer
estado uint64, de modo que cada corrida se puede repetir con `--seed`.
"""

from typing import List

import numpy as np

from utils.errors import OutOfRange
from utils.validators import validate_integer

SEED_MAX = 2 ** 64 - 1


def require_seed(seed) -> int:
    value = validate_integer(seed, 0, SEED_MAX)
    if value is None:
        raise OutOfRange(f"Semilla fuera de [0, 2^64): {seed!r}", "seed", seed)
    return value


def make_generator(seed: int) -> np.random.Generator:
    """Generator(PCG64) determinista para una semilla de 64 bits."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(require_seed(seed))))


def spawn_seeds(base: int, n: int) -> List[int]:
    """n semillas independientes derivadas de `base`."""
    children = np.random.SeedSequence(require_seed(base)).spawn(n)
    return [int(child.generate_state(1, np.uint64)[0]) for child in children]

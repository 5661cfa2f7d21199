"""
Módulo de Validación
Validadores escalares compartidos por el modelo y la CLI.
"""

import math
import logging
from typing import Any, Optional, Tuple

from utils.errors import NonPositiveInput, OutOfRange, ValidationError

logger = logging.getLogger(__name__)


def validate_integer(value: Any, min_val: int = None, max_val: int = None) -> Optional[int]:
    """
    Valida y convierte un valor a entero.

    Args:
        value: Valor a validar
        min_val: Valor mínimo aceptado (opcional)
        max_val: Valor máximo aceptado (opcional)

    Returns:
        Entero validado o None si inválido
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, float) and not value.is_integer():
        return None
    try:
        int_val = int(value)
        if min_val is not None and int_val < min_val:
            return None
        if max_val is not None and int_val > max_val:
            return None
        return int_val
    except (ValueError, TypeError):
        return None


def validate_probability(value: Any) -> bool:
    """
    Valida que un valor sea una probabilidad real en [0, 1].

    Args:
        value: Valor a validar

    Returns:
        True si es un real finito en [0, 1]
    """
    try:
        x = float(value)
    except (ValueError, TypeError):
        return False
    return math.isfinite(x) and 0.0 <= x <= 1.0


def require_positive_int(name: str, value: Any, max_val: int = None) -> int:
    """
    Exige un entero ≥ 1 (capacidades, umbrales, horizontes).

    Raises:
        OutOfRange: Si no es entero o está fuera de rango
    """
    int_val = validate_integer(value, min_val=1, max_val=max_val)
    if int_val is None:
        upper = f", ≤ {max_val}" if max_val is not None else ""
        raise OutOfRange(f"{name} debe ser un entero ≥ 1{upper} (recibido {value!r})", name, value)
    return int_val


def require_positive_real(name: str, value: Any) -> float:
    """
    Exige un real finito > 0.

    Raises:
        NonPositiveInput: Si no es positivo o no es numérico
    """
    try:
        x = float(value)
    except (ValueError, TypeError):
        raise NonPositiveInput(f"{name} no es numérico: {value!r}", name, value) from None
    if not math.isfinite(x) or x <= 0.0:
        raise NonPositiveInput(f"{name} debe ser > 0 (recibido {value!r})", name, value)
    return x


def require_open_probability(name: str, value: Any, allow_one: bool = False) -> float:
    """
    Exige una probabilidad en (0, 1) o en (0, 1] si `allow_one`.

    Raises:
        OutOfRange: Si está fuera del intervalo
    """
    if not validate_probability(value):
        raise OutOfRange(f"{name} debe estar en [0, 1] (recibido {value!r})", name, value)
    x = float(value)
    upper_ok = x <= 1.0 if allow_one else x < 1.0
    if not (x > 0.0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise OutOfRange(f"{name} debe estar en {interval} (recibido {value!r})", name, value)
    return x


def parse_int_range(text: str) -> Tuple[int, int]:
    """
    Interpreta un rango "a:b" o "a" (inclusive) de enteros positivos.

    Raises:
        ValidationError: Si el texto no es un rango válido
    """
    parts = str(text).split(':')
    if len(parts) not in (1, 2):
        raise ValidationError(f"Rango inválido: {text!r}", "range", text)
    lo = validate_integer(parts[0], min_val=1)
    hi = validate_integer(parts[-1], min_val=1)
    if lo is None or hi is None or hi < lo:
        raise ValidationError(f"Rango inválido: {text!r}", "range", text)
    return lo, hi

"""
Errores del toolkit
Jerarquía de excepciones con código de salida para la CLI.
"""

from typing import Any, Optional


class EHNetError(Exception):
    """Error base. `exit_code` es el código con el que termina la CLI."""

    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        super().__init__(message)
        self.field = field
        self.value = value


###############################################################################
# Validación (exit 3)
###############################################################################
class ValidationError(EHNetError):
    """Entrada inválida; `field` nombra el campo culpable."""

    exit_code = 3


class NonStochastic(ValidationError):
    """Las probabilidades conjuntas no suman 1."""


class OutOfRange(ValidationError):
    """Un valor fuera de su rango permitido."""


class NonPositiveInput(ValidationError):
    """Se esperaba un valor estrictamente positivo."""


class InvalidState(ValidationError):
    """Estado de baterías incompatible con los umbrales."""


class DimensionMismatch(ValidationError):
    """Distribución estacionaria con forma distinta a la rejilla γ1×γ2."""


class PreconditionViolated(ValidationError):
    """Fórmula cerrada usada fuera de su hipótesis."""


class ApproximationDomain(PreconditionViolated):
    """Aproximación de δ′ grande fuera de dominio (γn·δ′ ≤ 1)."""


class AmbiguousCase(ValidationError):
    """La regla cerrada no decide (capacidades iguales)."""


###############################################################################
# Fallos internos (exit 1)
###############################################################################
class LcmOverflow(EHNetError):
    """El LCM excede el entero con signo de 64 bits."""


class NoConvergence(EHNetError):
    """El solver estacionario no alcanzó la tolerancia."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ZeroAnalyticValue(EHNetError, ZeroDivisionError):
    """%RE indefinido: el valor analítico es 0."""


###############################################################################
# CLI
###############################################################################
class UsageError(EHNetError):
    """Argumentos de línea de comandos incorrectos."""

    exit_code = 2


class VerificationFailed(EHNetError):
    """Una o más comprobaciones de `verify` fallaron."""

    exit_code = 4

    def __init__(self, message: str, failures: Optional[list] = None):
        super().__init__(message)
        self.failures = failures or []

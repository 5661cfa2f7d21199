"""
Configuration Loader Module
Gestiona la carga y guardado de la configuración (JSON).
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from utils.errors import ValidationError
from utils.paths import CONFIG_DIR

logger = logging.getLogger(__name__)


class Config:
    """Gestiona la configuración del toolkit."""

    def __init__(self, config_path: Optional[str] = None, required: bool = False):
        """
        Args:
            config_path: Ruta al archivo de configuración (default: CONFIG_DIR/config.json)
            required: Si True, un archivo ausente o ilegible es un error en vez
                de caer a los valores por defecto

        Raises:
            ValidationError: `required` y el archivo no existe o no es JSON válido
        """
        if config_path is None:
            config_path = CONFIG_DIR / "config.json"

        self.config_path = Path(config_path)
        self.required = required
        self.config: Dict[str, Any] = {}

        self._load_config()

    def _load_config(self) -> None:
        """Carga la configuración y la superpone a los valores por defecto."""
        defaults = self._get_default_config()
        if not self.config_path.exists():
            if self.required:
                raise ValidationError(
                    f"Archivo de config no encontrado: {self.config_path}", "config", str(self.config_path)
                )
            logger.warning(f"Archivo de config no encontrado: {self.config_path}")
            self.config = defaults
            return

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
            if not isinstance(loaded, dict):
                raise ValueError("se esperaba un objeto JSON")
        except ValueError as e:
            # JSONDecodeError es subclase de ValueError
            if self.required:
                raise ValidationError(
                    f"JSON inválido en {self.config_path}: {e}", "config", str(self.config_path)
                ) from e
            logger.error(f"Error decodificando {self.config_path.name}: {e}")
            self.config = defaults
            return

        self.config = _merge(defaults, loaded)
        logger.debug(f"Configuración cargada desde {self.config_path}")

    @staticmethod
    def _get_default_config() -> Dict[str, Any]:
        """Retorna la configuración por defecto."""
        return {
            "network": {
                "caps": [10, 10],
                "gammas": [5, 9],
                "delta_prime": 30.0,
                "probs": {"p00": 0.25, "p10": 0.25, "p01": 0.25, "p11": 0.25}
            },
            "simulation": {
                "horizon": 10000,
                "seed": 7,
                "batches": 20
            },
            "optimize": {
                "tie_tolerance": 1e-12
            },
            "sweep": {
                "gamma1": None,
                "gamma2": None,
                "delta_primes": [],
                "threads": 4
            },
            "verify": {
                "uniformity_max_gamma": 10,
                "uniformity_trials": 50,
                "uniformity_tolerance": 1e-9,
                "sim_configs": 20,
                "sim_horizon": 1000000,
                "sigma_bound": 3.0,
                "re_bound_percent": 2.0,
                "gradient_points": 200,
                "oracle_tolerance": 1e-9
            },
            "logging": {
                "level": "INFO",
                "file": False,
                "log_dir": "logs",
                "max_size_mb": 10,
                "backup_count": 5
            }
        }

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Obtiene un valor de configuración usando notación de puntos.

        Args:
            key_path: Ruta de la clave (ej: "simulation.horizon")
            default: Valor por defecto si no existe

        Returns:
            Valor de configuración o default
        """
        value = self.config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, key_path: str, value: Any) -> None:
        """
        Establece un valor de configuración usando notación de puntos.

        Args:
            key_path: Ruta de la clave (ej: "network.delta_prime")
            value: Nuevo valor
        """
        keys = key_path.split('.')
        config = self.config

        for key in keys[:-1]:
            if key not in config:
                config[key] = {}
            config = config[key]

        config[keys[-1]] = value
        logger.debug(f"Config actualizada: {key_path} = {value}")

    def save(self, path: Optional[str] = None) -> None:
        """Guarda la configuración a archivo."""
        target = Path(path) if path else self.config_path
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8') as f:
            json.dump(self.config, f, indent=2)
        logger.info(f"Configuración guardada en {target}")

    def reload(self) -> None:
        """Recarga la configuración desde archivo."""
        self._load_config()
        logger.info("Configuración recargada")

    @property
    def network(self) -> Dict[str, Any]:
        """Acceso directo a la red por defecto."""
        return self.config.get("network", {})

    @property
    def simulation(self) -> Dict[str, Any]:
        """Acceso directo a la configuración de simulación."""
        return self.config.get("simulation", {})

    @property
    def optimize(self) -> Dict[str, Any]:
        return self.config.get("optimize", {})

    @property
    def sweep(self) -> Dict[str, Any]:
        return self.config.get("sweep", {})

    @property
    def verify(self) -> Dict[str, Any]:
        return self.config.get("verify", {})

    @property
    def logging(self) -> Dict[str, Any]:
        return self.config.get("logging", {})


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Mezcla recursiva: `override` gana sobre `base`."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


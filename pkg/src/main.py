#!/usr/bin/env python3
"""
ehnet - Main Entry Point

Red de acceso aleatorio de dos nodos con recolección de energía correlada:
throughput analítico, simulación Monte Carlo y selección de umbrales.

Códigos de salida: 0 ok, 1 error interno, 2 uso, 3 validación,
4 verificación fallida.
"""

import sys
from pathlib import Path
from typing import Optional, Sequence

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent))

from cli.commands import execute
from cli.runspec import parse
from utils.errors import EHNetError
from utils.logger import setup_logging, get_logger
from utils.paths import resolve

logger = get_logger("main")


###############################################################################
# Entry Point
###############################################################################
def main(argv: Optional[Sequence[str]] = None) -> int:
    """Función principal; devuelve el código de salida."""
    setup_logging(level="INFO")

    try:
        spec = parse(argv)
    except EHNetError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code

    log_settings = spec.settings.get("logging", {})
    setup_logging(
        level=spec.log_level,
        log_dir=str(resolve(log_settings.get("log_dir", "logs"))),
        file=bool(log_settings.get("file", False)),
        max_size_mb=log_settings.get("max_size_mb", 10),
        backup_count=log_settings.get("backup_count", 5)
    )

    try:
        return execute(spec)
    except EHNetError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrumpido por el usuario")
        return 1
    except Exception as e:
        logger.exception(f"Error interno: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
Logging Module
Logging de ehnet: consola con colores en stderr y archivos con rotación.

stdout queda reservado para tablas y CSV, así que ningún handler escribe ahí.
"""

import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

try:
    from colorlog import ColoredFormatter
    COLORLOG_AVAILABLE = True
except ImportError:
    COLORLOG_AVAILABLE = False

from utils.paths import LOGS_DIR

LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}

# (nombre de archivo, nivel mínimo; None = nivel configurado)
LOG_FILES = (("ehnet.log", None), ("errors.log", logging.ERROR))


def _console_formatter(name_width: int) -> logging.Formatter:
    fields = f"%(name)-{name_width}s"
    if not COLORLOG_AVAILABLE:
        return logging.Formatter(f"%(levelname)-8s {fields} %(message)s")
    return ColoredFormatter(
        f"%(log_color)s%(levelname)-8s%(reset)s %(blue)s{fields}%(reset)s %(message)s",
        reset=True,
        log_colors=LOG_COLORS
    )


class Logger:
    """Configura el logger raíz de la aplicación."""

    NAME_WIDTH = 22
    DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
    FILE_FORMAT = "%(asctime)s - %(levelname)-8s - %(name)s - %(message)s"

    def __init__(
        self,
        log_dir: Optional[str] = None,
        level: str = "INFO",
        console: bool = True,
        file: bool = False,
        max_size_mb: int = 10,
        backup_count: int = 5
    ):
        """
        Args:
            log_dir: Directorio para logs (default: LOGS_DIR)
            level: Nivel de logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
            console: Si True, loguea a stderr
            file: Si True, loguea a archivo con rotación
            max_size_mb: Tamaño máximo por archivo antes de rotar
            backup_count: Número de archivos rotados a conservar
        """
        self.log_dir = Path(log_dir) if log_dir else LOGS_DIR
        self.level = getattr(logging, level.upper(), logging.INFO)
        self.max_bytes = max_size_mb * 1024 * 1024
        self.backup_count = backup_count

        self.logger = logging.getLogger()
        self.logger.setLevel(self.level)
        # Reconfigurar reemplaza, no acumula
        self.logger.handlers.clear()

        if console:
            handler = logging.StreamHandler(sys.stderr)
            handler.setLevel(self.level)
            handler.setFormatter(_console_formatter(self.NAME_WIDTH))
            self.logger.addHandler(handler)

        if file:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            files = list(LOG_FILES)
            if self.level <= logging.DEBUG:
                files.append(("debug.log", logging.DEBUG))
            for filename, min_level in files:
                self.logger.addHandler(self._rotating(filename, min_level or self.level))

    def _rotating(self, filename: str, level: int) -> RotatingFileHandler:
        handler = RotatingFileHandler(
            self.log_dir / filename,
            maxBytes=self.max_bytes,
            backupCount=self.backup_count,
            encoding='utf-8'
        )
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter(self.FILE_FORMAT, self.DATE_FORMAT))
        return handler


def setup_logging(
    level: str = "INFO",
    log_dir: Optional[str] = None,
    file: bool = False,
    max_size_mb: int = 10,
    backup_count: int = 5
) -> None:
    """Configura el logging para toda la aplicación (ver `Logger`)."""
    Logger(
        level=level,
        log_dir=log_dir,
        file=file,
        max_size_mb=max_size_mb,
        backup_count=backup_count
    )


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)

"""
Salida de la CLI: tablas legibles (6 cifras significativas) y CSV a
precisión completa a través de un único escritor.
"""

import csv
import sys
import logging
import threading
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, TextIO, Tuple

logger = logging.getLogger(__name__)

SURFACE_CSV_COLUMNS = ("gamma1", "gamma2", "r1", "r2", "total", "model_used", "delta_prime")
ERROR_PROFILE_CSV_COLUMNS = (
    "gamma1", "gamma2", "delta_prime", "horizon", "seed",
    "r1_analytic", "r2_analytic", "total_analytic",
    "r1_sim", "r2_sim", "total_sim",
    "re1", "re2", "re_total", "ae1", "ae2", "ae_total",
)


def fmt(value: Any) -> str:
    """6 cifras significativas para reales; '-' para ausentes."""
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_table(title: str, rows: Sequence[Tuple[str, Any]], stream: TextIO = None) -> None:
    """Tabla de dos columnas etiqueta/valor."""
    stream = stream or sys.stdout
    width = max((len(label) for label, _ in rows), default=0)
    print(f"== {title} ==", file=stream)
    for label, value in rows:
        print(f"  {label.ljust(width)}  {fmt(value)}", file=stream)


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


class CsvWriter:
    """Escritor CSV único; todas las filas pasan por aquí."""

    def __init__(self, columns: Sequence[str], path: Optional[Path] = None):
        self.columns = tuple(columns)
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._file: Optional[TextIO] = None
        self._writer = None
        self.rows_written = 0

    def __enter__(self) -> "CsvWriter":
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._file = open(self.path, 'w', newline='', encoding='utf-8')
            stream = self._file
        else:
            stream = sys.stdout
        self._writer = csv.writer(stream, lineterminator='\n')
        self._writer.writerow(self.columns)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._file is not None:
            self._file.close()
            logger.info(f"{self.rows_written} filas escritas en {self.path}")
        self._file = None

    def write(self, row: Dict[str, Any]) -> None:
        with self._lock:
            self._writer.writerow([_cell(row.get(col)) for col in self.columns])
            self.rows_written += 1

    def write_all(self, rows: Iterable[Dict[str, Any]]) -> None:
        for row in rows:
            self.write(row)


def write_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]], path: Optional[Path] = None) -> int:
    """Escribe `rows` en `path` (o stdout) y devuelve el número de filas."""
    with CsvWriter(columns, path) as writer:
        writer.write_all(rows)
        return writer.rows_written

"""
Thread-safe collector for independent simulation runs.
"""
import threading
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional


@dataclass
class ResultCollector:
    """Único dueño de la mutación cuando varias corridas terminan en paralelo."""
    expected: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _results: Dict[int, Any] = field(default_factory=dict, repr=False)
    _errors: Dict[int, str] = field(default_factory=dict, repr=False)
    started_at: Optional[datetime] = None

    def start(self, expected: int) -> None:
        with self._lock:
            self.expected = expected
            self._results.clear()
            self._errors.clear()
            self.started_at = datetime.now()

    def add(self, index: int, result: Any) -> None:
        """Thread-safe insert."""
        with self._lock:
            if index in self._results:
                raise KeyError(f"Resultado {index} ya registrado")
            self._results[index] = result

    def fail(self, index: int, message: str) -> None:
        with self._lock:
            self._errors[index] = message

    def results(self) -> List[Any]:
        """Resultados en el orden de entrada."""
        with self._lock:
            return [self._results[i] for i in sorted(self._results)]

    def get_snapshot(self) -> dict:
        """Thread-safe snapshot."""
        with self._lock:
            done = len(self._results)
            return {
                "expected": self.expected,
                "done": done,
                "failed": len(self._errors),
                "progress": int(100 * done / self.expected) if self.expected else 0,
                "errors": dict(self._errors),
                "started_at": self.started_at.isoformat() if self.started_at else None
            }

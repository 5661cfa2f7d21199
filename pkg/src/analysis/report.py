"""
Throughput Report
Tasas medias de largo plazo por nodo y su origen.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

from utils.errors import OutOfRange


class ThroughputSource(str, Enum):
    """Modelo que produjo el informe."""

    LEMMA1 = "lemma1"
    RENEWAL = "renewal"
    STATIONARY = "stationary-accounting"
    SIMULATED = "simulated"
    APPROX_SMALL = "approx-small-delta"
    APPROX_LARGE = "approx-large-delta"


@dataclass(frozen=True)
class ThroughputReport:
    """R̄1, R̄2 en nats/s/Hz; `total` es el objetivo z = R̄1 + R̄2."""

    r1: float
    r2: float
    source: ThroughputSource
    total: float = field(init=False)

    def __post_init__(self):
        if self.r1 < 0.0 or self.r2 < 0.0:
            field_name = "r1" if self.r1 < 0.0 else "r2"
            raise OutOfRange(
                f"Tasas negativas: r1={self.r1}, r2={self.r2}", field_name, getattr(self, field_name)
            )
        object.__setattr__(self, "source", ThroughputSource(self.source))
        object.__setattr__(self, "total", self.r1 + self.r2)

    def as_dict(self) -> Dict[str, object]:
        return {"r1": self.r1, "r2": self.r2, "total": self.total, "source": self.source.value}

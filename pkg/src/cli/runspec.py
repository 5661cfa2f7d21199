"""
Run Specification
Convierte argv (y el archivo de configuración) en un RunSpec validado.

Precedencia: valores por defecto < archivo JSON < flags.
"""

import os
import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from analysis.optimize import OBJECTIVES, EXACT
from network.model import EHProbabilities, NetworkConfig
from simulation.sim import SimulationConfig
from utils.config_loader import Config
from utils.errors import UsageError, ValidationError
from utils.validators import parse_int_range, validate_integer

logger = logging.getLogger(__name__)

COMMANDS = ("analytic", "simulate", "optimize", "sweep", "verify", "error-profile")
PRESETS = ("independent", "high-negative", "high-positive")

# Comandos que recorren la rejilla de umbrales completa
_GRID_COMMANDS = ("optimize", "sweep", "verify", "error-profile")


###############################################################################
# Domain Types
###############################################################################
@dataclass(frozen=True)
class SweepAxes:
    """Rangos inclusivos de γ1, γ2 y valores de δ′ a barrer."""

    gamma1: Tuple[int, int]
    gamma2: Tuple[int, int]
    delta_primes: Tuple[float, ...]


@dataclass(frozen=True)
class RunSpec:
    """Todo lo que necesita `execute` para una orden."""

    command: str
    network: NetworkConfig
    sim: Optional[SimulationConfig] = None
    sweep_axes: Optional[SweepAxes] = None
    output_path: Optional[Path] = None
    objective: str = EXACT
    check_closed_form: bool = False
    dump_chain: Optional[Path] = None
    threads: int = 1
    batches: int = 20
    gamma2_fixed: int = 9
    log_level: str = "INFO"
    settings: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"Orden desconocida: {self.command!r}", "command", self.command)
        if self.command in ("simulate", "verify", "error-profile") and self.sim is None:
            raise UsageError(f"'{self.command}' requiere configuración de simulación", "sim")
        if self.command == "sweep" and self.sweep_axes is None:
            raise UsageError("'sweep' requiere ejes de barrido", "sweep_axes")


###############################################################################
# Parser
###############################################################################
class ArgumentParser(argparse.ArgumentParser):
    """argparse que lanza UsageError en lugar de salir del proceso."""

    def error(self, message):
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    net = parser.add_argument_group("red")
    net.add_argument("--config", type=Path, help="Archivo JSON de configuración")
    net.add_argument("--preset", choices=PRESETS, help="Ley de recolección predefinida")
    net.add_argument("--p", type=float, help="Parámetro p de los presets de correlación alta (default 0.5)")
    net.add_argument("--probs", type=float, nargs=4, metavar=("P00", "P10", "P01", "P11"),
                     help="Ley conjunta explícita")
    net.add_argument("--caps", type=int, nargs=2, metavar=("B1", "B2"), help="Capacidades de batería")
    net.add_argument("--gammas", type=int, nargs=2, metavar=("G1", "G2"), help="Umbrales de transmisión")
    net.add_argument("--delta-prime", type=float, help="SNR normalizada δ′")
    net.add_argument("--output", type=Path, help="Destino CSV")
    net.add_argument("--threads", type=int, help="Hilos (limitado por EHNET_THREADS)")

    log = parser.add_argument_group("logging")
    level = log.add_mutually_exclusive_group()
    level.add_argument("--debug", action="store_const", dest="log_level", const="DEBUG")
    level.add_argument("--verbose", action="store_const", dest="log_level", const="INFO")
    level.add_argument("--quiet", action="store_const", dest="log_level", const="WARNING")


def _add_sim(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--horizon", type=int, help="Slots a simular (T)")
    parser.add_argument("--seed", type=int, help="Semilla de 64 bits")
    parser.add_argument("--batches", type=int, help="Lotes para el error estándar")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="ehnet",
        description="Red de acceso aleatorio de dos nodos con recolección de energía correlada"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgumentParser)
    sub.required = True

    analytic = sub.add_parser("analytic", help="Throughput exacto (modelo elegido automáticamente)")
    _add_common(analytic)
    analytic.add_argument("--dump-chain", type=Path, help="Vuelca la matriz de transición en CSV")

    simulate = sub.add_parser("simulate", help="Simulación Monte Carlo frente al valor analítico")
    _add_common(simulate)
    _add_sim(simulate)

    optimize = sub.add_parser("optimize", help="Búsqueda exhaustiva de umbrales")
    _add_common(optimize)
    optimize.add_argument("--objective", choices=OBJECTIVES, default=EXACT)
    optimize.add_argument("--verify", dest="check_closed_form", action="store_true",
                          help="Contrasta la regla cerrada del régimen con la búsqueda")

    sweep = sub.add_parser("sweep", help="Superficie del objetivo en CSV")
    _add_common(sweep)
    sweep.add_argument("--objective", choices=OBJECTIVES, default=EXACT)
    sweep.add_argument("--gamma1-range", help="Rango a:b de γ1 (default 1:B̄1)")
    sweep.add_argument("--gamma2-range", help="Rango a:b de γ2 (default 1:B̄2)")
    sweep.add_argument("--delta-primes", type=float, nargs="+", help="Valores de δ′")

    verify = sub.add_parser("verify", help="Batería de invariantes")
    _add_common(verify)
    _add_sim(verify)

    profile = sub.add_parser("error-profile", help="%%RE/%%AE frente a γ1 con γ2 fijo")
    _add_common(profile)
    _add_sim(profile)
    profile.add_argument("--gamma2-fixed", type=int, help="γ2 fijo (default 9)")

    return parser


###############################################################################
# Assembly
###############################################################################
def _probs(args: argparse.Namespace, file_probs: Dict[str, Any]) -> EHProbabilities:
    if args.probs is not None and args.preset is not None:
        raise UsageError("--probs y --preset son excluyentes", "probs")
    if args.p is not None and args.preset not in ("high-negative", "high-positive"):
        raise UsageError("--p solo aplica a los presets high-negative/high-positive", "p")

    if args.probs is not None:
        return EHProbabilities(*args.probs)
    if args.preset == "independent":
        return EHProbabilities.independent()
    p = 0.5 if args.p is None else args.p
    if not 0.0 < p < 1.0:
        raise ValidationError(f"p debe estar en (0, 1) (recibido {p})", "p", p)
    if args.preset == "high-negative":
        return EHProbabilities.high_negative(p)
    if args.preset == "high-positive":
        return EHProbabilities.high_positive(p)
    return EHProbabilities.from_dict(file_probs)


def _network(args: argparse.Namespace, config: Config) -> NetworkConfig:
    section = config.network
    caps = list(args.caps or section.get("caps", [10, 10]))
    if args.gammas is not None:
        gammas = list(args.gammas)
    else:
        gammas = list(section.get("gammas", [1, 1]))
        if args.command in _GRID_COMMANDS:
            # los umbrales del archivo son irrelevantes aquí; se ajustan a las capacidades
            gammas = [min(g, c) for g, c in zip(gammas, caps)]
    delta_prime = args.delta_prime if args.delta_prime is not None else section.get("delta_prime")
    probs = _probs(args, section.get("probs", {}))
    return NetworkConfig(caps[0], caps[1], gammas[0], gammas[1], delta_prime, probs)


def _threads(args: argparse.Namespace, config: Config) -> int:
    threads = args.threads if args.threads is not None else config.get("sweep.threads", 1)
    env = validate_integer(os.environ.get("EHNET_THREADS"), min_val=1)
    if env is not None:
        threads = min(threads, env)
    return max(1, int(threads))


def _sim(args: argparse.Namespace, config: Config, network: NetworkConfig) -> Optional[SimulationConfig]:
    if args.command == "simulate":
        horizon = args.horizon
    elif args.command == "verify":
        horizon = args.horizon or config.get("verify.sim_horizon", 1000000)
    elif args.command == "error-profile":
        horizon = args.horizon or config.get("simulation.horizon", 10000)
    else:
        return None
    seed = args.seed if args.seed is not None else config.get("simulation.seed", 0)
    return SimulationConfig(horizon, seed, network)


def _sweep_axes(args: argparse.Namespace, config: Config, network: NetworkConfig) -> SweepAxes:
    def _axis(flag: Optional[str], key: str, cap: int, name: str) -> Tuple[int, int]:
        text = flag or config.get(key)
        lo, hi = parse_int_range(text) if text else (1, cap)
        if hi > cap:
            raise ValidationError(f"{name}: rango {lo}:{hi} excede la capacidad {cap}", name, text)
        return lo, hi

    delta_primes: List[float] = list(args.delta_primes or config.get("sweep.delta_primes") or [network.delta_prime])
    return SweepAxes(
        gamma1=_axis(args.gamma1_range, "sweep.gamma1", network.cap1, "gamma1_range"),
        gamma2=_axis(args.gamma2_range, "sweep.gamma2", network.cap2, "gamma2_range"),
        delta_primes=tuple(float(d) for d in delta_primes)
    )


def parse(argv: Optional[Sequence[str]] = None) -> RunSpec:
    """
    Interpreta la línea de órdenes.

    Args:
        argv: Argumentos sin el nombre del programa (default: sys.argv[1:])

    Returns:
        RunSpec validado

    Raises:
        UsageError: Flags inválidos o ausentes (exit 2)
        ValidationError: Valores fuera de dominio, con el campo culpable (exit 3)
    """
    args = build_parser().parse_args(argv)
    # uso antes que validación: un flag ausente gana a un valor fuera de rango
    if args.command == "simulate" and args.horizon is None:
        raise UsageError("'simulate' requiere --horizon", "horizon")
    config = Config(args.config, required=args.config is not None)

    network = _network(args, config)
    sim = _sim(args, config, network)
    sweep_axes = _sweep_axes(args, config, network) if args.command == "sweep" else None

    batches = getattr(args, "batches", None) or config.get("simulation.batches", 20)
    gamma2_fixed = getattr(args, "gamma2_fixed", None) or 9

    spec = RunSpec(
        command=args.command,
        network=network,
        sim=sim,
        sweep_axes=sweep_axes,
        output_path=args.output,
        objective=getattr(args, "objective", EXACT),
        check_closed_form=getattr(args, "check_closed_form", False),
        dump_chain=getattr(args, "dump_chain", None),
        threads=_threads(args, config),
        batches=int(batches),
        gamma2_fixed=int(gamma2_fixed),
        log_level=args.log_level or config.get("logging.level", "INFO"),
        settings=config.config
    )
    logger.debug(f"RunSpec: {spec.command} γ={network.gammas} caps={network.caps} δ′={network.delta_prime}")
    return spec

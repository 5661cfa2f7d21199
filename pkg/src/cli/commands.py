"""
Command Execution
Despacha un RunSpec a la capa analítica, de simulación u optimización.
"""

import logging
from typing import Dict, List

from analysis.dispatch import dispatch_throughput, select_model
from analysis.optimize import (
    APPROX_LARGE,
    OptimizationOutcome,
    exhaustive_search,
    objective_surface,
    verify_closed_form,
)
from cli import verify
from cli.output import (
    ERROR_PROFILE_CSV_COLUMNS,
    SURFACE_CSV_COLUMNS,
    print_table,
    write_csv,
)
from cli.runspec import RunSpec
from network.markov import build_chain, dump_csv
from simulation import sim
from utils.errors import VerificationFailed

logger = logging.getLogger(__name__)


def _network_rows(spec: RunSpec) -> List[tuple]:
    net = spec.network
    probs = net.probs
    return [
        ("caps", f"{net.cap1} {net.cap2}"),
        ("gammas", f"{net.gamma1} {net.gamma2}"),
        ("delta_prime", net.delta_prime),
        ("probs", f"{probs.p00:.6g} {probs.p10:.6g} {probs.p01:.6g} {probs.p11:.6g}"),
    ]


def _outcome_rows(outcome: OptimizationOutcome) -> List[tuple]:
    return [
        ("best", outcome.best),
        ("best_value", outcome.best_value),
        ("ties", ", ".join(str(t) for t in outcome.ties)),
        ("evaluated", outcome.evaluated),
        ("model_used", outcome.model_used),
    ]


###############################################################################
# Commands
###############################################################################
def cmd_analytic(spec: RunSpec) -> int:
    net = spec.network
    model = select_model(net.probs)
    report = dispatch_throughput(net, model)
    print_table("Throughput analítico", _network_rows(spec) + [
        ("model", model.value),
        ("r1", report.r1),
        ("r2", report.r2),
        ("total", report.total),
        ("source", report.source.value),
    ])
    if spec.dump_chain:
        dump_csv(build_chain(net), spec.dump_chain)
    if spec.output_path:
        write_csv(SURFACE_CSV_COLUMNS, [{
            "gamma1": net.gamma1, "gamma2": net.gamma2, "r1": report.r1, "r2": report.r2,
            "total": report.total, "model_used": model.value, "delta_prime": net.delta_prime,
        }], spec.output_path)
    return 0


def cmd_simulate(spec: RunSpec) -> int:
    result = sim.run(spec.sim, batches=spec.batches)
    analytic = dispatch_throughput(spec.network)
    errors = sim.compare(result, analytic)
    se1, se2, se_total = result.std_error
    print_table("Simulación", _network_rows(spec) + [
        ("horizon", spec.sim.horizon),
        ("seed", spec.sim.seed),
        ("successes", f"{result.successes1} {result.successes2}"),
        ("collisions", result.collisions),
        ("r1 sim / analytic", f"{result.report.r1:.6g} / {analytic.r1:.6g} (σ={se1:.3g})"),
        ("r2 sim / analytic", f"{result.report.r2:.6g} / {analytic.r2:.6g} (σ={se2:.3g})"),
        ("total sim / analytic", f"{result.report.total:.6g} / {analytic.total:.6g} (σ={se_total:.3g})"),
        ("%RE (1, 2, total)", " ".join(_fmt_re(m.re_percent) for m in (errors.node1, errors.node2, errors.total))),
        ("%AE (1, 2, total)", " ".join(f"{m.ae_percent:.6g}" for m in (errors.node1, errors.node2, errors.total))),
    ])
    if spec.output_path:
        write_csv(sim.SIM_CSV_COLUMNS, [sim.csv_row(result, errors)], spec.output_path)
    return 0


def _fmt_re(value) -> str:
    return "-" if value is None else f"{value:.6g}"


def _closed_form_kind(spec: RunSpec) -> str:
    """Regla cerrada aplicable, o "" si la ley cae fuera de su parámetro p ∈ (0, 1)."""
    probs = spec.network.probs
    if probs.p00 == 0.0 and probs.p11 == 0.0:
        # p10 = 0 o 1: un solo nodo cosecha
        return "negative" if 0.0 < probs.p10 < 1.0 else ""
    if probs.p01 == 0.0 and probs.p10 == 0.0 and probs.p11 > 0.0:
        if spec.objective == APPROX_LARGE or spec.network.delta_prime > 1.0:
            return "positive-large"
        return "positive-small"
    return ""


def cmd_optimize(spec: RunSpec) -> int:
    net = spec.network
    tie_tolerance = spec.settings.get("optimize", {}).get("tie_tolerance", 1e-12)
    outcome = exhaustive_search(net.caps, net.probs, net.delta_prime, spec.objective, tie_tolerance, spec.threads)
    print_table("Umbrales óptimos", [r for r in _network_rows(spec) if r[0] != "gammas"] + _outcome_rows(outcome))

    if spec.check_closed_form:
        kind = _closed_form_kind(spec)
        if not kind:
            logger.warning("Ninguna regla cerrada aplica a esta ley de recolección")
        else:
            p = net.probs.p10 if kind == "negative" else net.probs.p11
            check = verify_closed_form(kind, net.caps, p, net.delta_prime, spec.threads)
            rows = [("rule", kind)]
            if check.closed is None:
                rows.append(("closed form", f"no aplica: {check.reason}"))
            else:
                rows += [
                    ("closed form", ", ".join(str(t) for t in check.closed.ties)),
                    ("agrees (exact)", check.agrees_exact),
                    ("agrees (approx)", check.agrees_approx),
                    ("gap (exact)", check.gap_exact),
                ]
            print_table("Regla cerrada", rows)

    if spec.output_path:
        points = objective_surface(net.caps, net.probs, net.delta_prime, spec.objective, spec.threads)
        write_csv(SURFACE_CSV_COLUMNS, _surface_rows(points, net.delta_prime), spec.output_path)
    return 0


def _surface_rows(points, delta_prime: float) -> List[Dict[str, object]]:
    return [
        {"gamma1": pt.gamma1, "gamma2": pt.gamma2, "r1": pt.r1, "r2": pt.r2,
         "total": pt.total, "model_used": pt.model_used, "delta_prime": delta_prime}
        for pt in points
    ]


def cmd_sweep(spec: RunSpec) -> int:
    net = spec.network
    axes = spec.sweep_axes
    rows = []
    for delta_prime in axes.delta_primes:
        points = objective_surface(
            net.caps, net.probs, delta_prime, spec.objective, spec.threads,
            gamma1_range=axes.gamma1, gamma2_range=axes.gamma2
        )
        rows += _surface_rows(points, delta_prime)
        best = max(points, key=lambda pt: pt.total)
        logger.info(f"δ′={delta_prime}: máximo en {best.pair} (z={best.total:.6g})")
    write_csv(SURFACE_CSV_COLUMNS, rows, spec.output_path)
    return 0


def cmd_verify(spec: RunSpec) -> int:
    results = verify.run_suite(spec)
    print_table("Verificación", [
        (r.name, ("OK " if r.passed else "FALLO ") + r.detail) for r in results
    ])
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise VerificationFailed(f"Comprobaciones fallidas: {', '.join(failed)}", failures=failed)
    return 0


def cmd_error_profile(spec: RunSpec) -> int:
    rows = sim.error_profile(
        spec.network, spec.sim.horizon, spec.sim.seed,
        gamma2=spec.gamma2_fixed, threads=spec.threads, batches=spec.batches
    )
    records = []
    for row in rows:
        result, analytic, errors = row.result, row.analytic, row.errors
        records.append({
            "gamma1": row.gamma1,
            "gamma2": spec.gamma2_fixed,
            "delta_prime": spec.network.delta_prime,
            "horizon": result.config.horizon,
            "seed": result.config.seed,
            "r1_analytic": analytic.r1,
            "r2_analytic": analytic.r2,
            "total_analytic": analytic.total,
            "r1_sim": result.report.r1,
            "r2_sim": result.report.r2,
            "total_sim": result.report.total,
            "re1": errors.node1.re_percent,
            "re2": errors.node2.re_percent,
            "re_total": errors.total.re_percent,
            "ae1": errors.node1.ae_percent,
            "ae2": errors.node2.ae_percent,
            "ae_total": errors.total.ae_percent,
        })
        logger.info(f"γ1={row.gamma1}: %RE={_fmt_re(errors.total.re_percent)} %AE={errors.total.ae_percent:.4g}")
    write_csv(ERROR_PROFILE_CSV_COLUMNS, records, spec.output_path)
    return 0


COMMAND_HANDLERS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "error-profile": cmd_error_profile,
}


def execute(spec: RunSpec) -> int:
    """
    Ejecuta la orden del RunSpec.

    Returns:
        Código de salida (0 si todo fue bien)

    Raises:
        VerificationFailed: `verify` con alguna comprobación fallida (exit 4)
    """
    logger.info(f"Ejecutando '{spec.command}'")
    return COMMAND_HANDLERS[spec.command](spec)

"""One-parameter grid scans producing plot-ready (parameter, value) tables."""
from __future__ import annotations

from typing import Callable, Dict, List

from config.settings import Settings
from packages.qubit_core.qubit_core import bloch_from_angles
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.logging import get_logger
from packages.tpm_engine.tpm_engine import (
    free_energy_difference,
    jarzynski_average,
    taylor_partial_sum,
    work_moment,
)
from packages.work_chsh.work_chsh import work_bell_combination
from schemas.documents import RunRequest, ScanDescriptor
from .builders import DEFAULT_AXIS_F, axis_or, protocol_from, work_bell_from
from .output import Outcome, build_document

logger = get_logger("cli.scan")

DEFAULT_TAYLOR_ORDER = 40

Quantity = Callable[[RunRequest], float]


def _order(req: RunRequest, default: int = 1) -> int:
    return default if req.order is None else req.order


def _work_bell(req: RunRequest) -> float:
    n = _order(req)
    return work_bell_combination(work_bell_from(req, n), n).value


QUANTITIES: Dict[str, Quantity] = {
    "jarzynski": lambda req: jarzynski_average(protocol_from(req)),
    "moment": lambda req: work_moment(protocol_from(req), _order(req)),
    "taylor": lambda req: taylor_partial_sum(protocol_from(req), _order(req, DEFAULT_TAYLOR_ORDER)),
    "work-bell": _work_bell,
    "free-energy": lambda req: free_energy_difference(protocol_from(req)),
}


def at_point(req: RunRequest, scan: ScanDescriptor, x: float) -> RunRequest:
    """Copy of req with the scanned parameter set to x; domain constructors re-validate it."""
    if scan.param == "beta":
        return req.model_copy(update={"beta": x})
    if scan.param == "energy":
        return req.model_copy(update={"energy": x})
    if scan.param == "time":
        return req.model_copy(update={"time": x})
    _, phi = axis_or(req.axis_f, DEFAULT_AXIS_F).angles()
    return req.model_copy(update={"axis_f": bloch_from_angles(x, phi).as_tuple()})


def run_scan(req: RunRequest, settings: Settings) -> Outcome:
    scan = req.scan
    if scan is None:
        raise InvalidParameterError("scan", "missing scan descriptor")
    if req.quantity == "work-bell" and scan.param in ("time", "angle-theta-f"):
        raise InvalidParameterError("scan", f"work-bell combinations do not depend on '{scan.param}'")
    quantity = QUANTITIES[req.quantity]

    rows: List[List[float]] = []
    for x in scan.grid():
        rows.append([x, quantity(at_point(req, scan, x))])
    logger.debug("scanned %s over %d points", scan.param, len(rows))

    values = [v for _, v in rows]
    results = {
        "points": len(rows),
        "first": values[0],
        "last": values[-1],
        "min": min(values),
        "max": max(values),
    }
    notes = [f"{req.quantity} as a function of {scan.param}"]
    if scan.param == "time" and req.evolution == "quench":
        notes.append("a sudden quench does not depend on time; use --evolution final-ht")
    doc = build_document(
        req,
        results,
        columns=["parameter", "value"],
        rows=rows,
        notes=notes,
        digits=settings.OUTPUT.significant_digits,
    )
    return Outcome(doc)

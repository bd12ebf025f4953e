# packages/work_chsh/work_chsh/combinations.py
"""
Bell-like combinations of work moments.

For equal spectra ±E and U = I every moment factorizes as
⟨W^n⟩_{A,B} = f_n(E, β)·(1 - a·b), so the CHSH-signed combination over
(A₁, A₂) x (B₁, B₂) is f_n·(2 - S) with S the temporal CHSH Bloch term.
Classical strategies confine S to [-2, 2], quantum axes to [-2√2, 2√2].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from packages.qubit_core.qubit_core import BlochVector, TwoLevelHamiltonian
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.logging import get_logger
from packages.shared.shared.types import Convention
from packages.temporal_bell.temporal_bell import (
    CLASSICAL_CHSH_BOUND,
    TSIRELSON_BOUND,
    AxisParametrization,
    CHSHSettings,
    canonical_chsh_settings,
    maximize_angles,
)
from packages.tpm_engine.tpm_engine import (
    MAX_MOMENT_ORDER,
    ProtocolSpec,
    jarzynski_average,
    moment_closed_form,
    work_moment,
)
from .models import MomentCombination, WorkBellSettings

logger = get_logger("work_chsh")


def _validate_order(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or not 1 <= int(n) <= MAX_MOMENT_ORDER:
        raise InvalidParameterError("n", f"must be an integer in [1, {MAX_MOMENT_ORDER}], got {n!r}")
    return int(n)


def _clean(x: float) -> float:
    # fold -0.0 into 0.0
    return x + 0.0


def moment_prefactor(E: float, beta: float, n: int) -> float:
    """f_n = 2^{n-1} E^n (e^{-βE} + (-1)^n e^{βE}) / (e^{-βE} + e^{βE})."""
    return moment_closed_form(E, beta, 0.0, _validate_order(n))


def work_bell_combination(s: WorkBellSettings, n: int) -> MomentCombination:
    n = _validate_order(n)
    bloch_term = s.chsh().bloch_term()
    value = moment_prefactor(s.energy, s.beta, n) * (2.0 - bloch_term)
    return MomentCombination(order=n, value=_clean(value), chsh_bloch_term=bloch_term)


def protocol_work_bell_combination(s: WorkBellSettings, n: int) -> float:
    """Same combination summed from four independent two-point-measurement runs."""
    n = _validate_order(n)
    total = 0.0
    for initial_axis, final_axis, sign in s.chsh().pairs():
        total += sign * work_moment(s.pair_spec(initial_axis, final_axis), n)
    return total


def _interval(f: float, s_lo: float, s_hi: float) -> Tuple[float, float]:
    ends = (f * (2.0 - s_hi), f * (2.0 - s_lo))
    return _clean(min(ends)), _clean(max(ends))


def classical_work_bounds(E: float, beta: float, n: int) -> Tuple[float, float]:
    f = moment_prefactor(E, beta, n)
    return _interval(f, -CLASSICAL_CHSH_BOUND, CLASSICAL_CHSH_BOUND)


def quantum_work_extrema(E: float, beta: float, n: int) -> Tuple[float, float]:
    f = moment_prefactor(E, beta, n)
    return _interval(f, -TSIRELSON_BOUND, TSIRELSON_BOUND)


@dataclass(frozen=True)
class ExpWorkBell:
    per_pair: Tuple[float, float, float, float]
    combination: float


def exp_work_bell_combination(s: WorkBellSettings) -> ExpWorkBell:
    """Jarzynski averages of the four runs (A₁B₁, A₁B₂, A₂B₁, A₂B₂) and their CHSH sum."""
    values: List[float] = []
    combination = 0.0
    for initial_axis, final_axis, sign in s.chsh().pairs():
        value = jarzynski_average(s.pair_spec(initial_axis, final_axis))
        values.append(value)
        combination += sign * value
    return ExpWorkBell(per_pair=(values[0], values[1], values[2], values[3]), combination=combination)


def temperature_scan(s: WorkBellSettings, betas: Sequence[float], n: int) -> List[Tuple[float, float]]:
    n = _validate_order(n)
    series: List[Tuple[float, float]] = []
    for beta in betas:
        series.append((float(beta), work_bell_combination(s.with_beta(beta), n).value))
    return series


def optimal_work_settings(E: float, beta: float, n: int) -> CHSHSettings:
    """
    Axes maximizing f_n·(2 - S): the canonical CHSH axes (S = 2√2) when f_n ≤ 0,
    otherwise the canonical axes with both final axes flipped (S = -2√2).
    """
    canonical = canonical_chsh_settings()
    if moment_prefactor(E, beta, n) > 0.0:
        return canonical.with_final_negated()
    return canonical


@dataclass(frozen=True)
class WorkOptimizationResult:
    settings: WorkBellSettings
    value: float
    restart: int


def settings_optimizer(
    E: float,
    beta: float,
    n: int,
    restarts: int,
    seed: int,
    *,
    workers: int = 1,
    max_sweeps: int = 400,
) -> WorkOptimizationResult:
    n = _validate_order(n)
    f = moment_prefactor(E, beta, n)
    param = AxisParametrization()

    def objective(x: Sequence[float]) -> float:
        return f * (2.0 - param.bloch_term(x))

    best = maximize_angles(objective, param.dim, restarts=restarts, seed=seed, max_sweeps=max_sweeps, workers=workers)
    settings = WorkBellSettings.from_chsh(param.settings(best.x), E, beta)
    value = work_bell_combination(settings, n).value
    logger.debug("work-bell optimum n=%d beta=%.6g: %.15g (restart %d)", n, beta, value, best.restart)
    return WorkOptimizationResult(settings=settings, value=value, restart=best.restart)


# ---------- caller-weighted combinations (three-setting mechanism) ----------

@dataclass(frozen=True)
class WeightedTerm:
    initial_axis: BlochVector
    final_axis: BlochVector
    weight: float


def weighted_work_combination(
    terms: Sequence[WeightedTerm],
    E: float,
    beta: float,
    n: int,
) -> float:
    """Σ weight·⟨W^n⟩ over caller-chosen (initial, final) runs, each in its own thermal basis."""
    n = _validate_order(n)
    if not terms:
        raise InvalidParameterError("terms", "at least one weighted term is required")
    total = 0.0
    for term in terms:
        spec = ProtocolSpec(
            initial=TwoLevelHamiltonian(E, term.initial_axis),
            final=TwoLevelHamiltonian(E, term.final_axis),
            beta=beta,
        )
        total += term.weight * work_moment(spec, n)
    return total


def three_setting_terms(
    a: BlochVector,
    b1: BlochVector,
    b2: BlochVector,
    convention: Convention = "minus",
    weights: Optional[Tuple[float, float, float]] = None,
) -> List[WeightedTerm]:
    """
    Runs (A,B₁), (A,B₂), (B₁,B₂) weighted (+1, -1, ∓1) by default, mirroring
    the correlator signs of the chosen three-setting inequality.
    """
    if weights is None:
        if convention not in ("plus", "minus"):
            raise InvalidParameterError("convention", f"expected 'plus' or 'minus', got {convention!r}")
        weights = (1.0, -1.0, -1.0 if convention == "minus" else 1.0)
    w_ab1, w_ab2, w_b1b2 = weights
    return [
        WeightedTerm(a, b1, w_ab1),
        WeightedTerm(a, b2, w_ab2),
        WeightedTerm(b1, b2, w_b1b2),
    ]


def three_setting_work(
    a: BlochVector,
    b1: BlochVector,
    b2: BlochVector,
    E: float,
    beta: float,
    n: int,
    convention: Convention = "minus",
) -> float:
    return weighted_work_combination(three_setting_terms(a, b1, b2, convention), E, beta, n)

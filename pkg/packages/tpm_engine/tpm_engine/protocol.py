# packages/tpm_engine/tpm_engine/protocol.py
"""
Forward two-point-measurement protocol.

Contract
--------
    measure H_i  ->  evolve with U  ->  measure H_f

    p(n, m) = tr{ P^f_m U P^i_n ρ_i P^i_n U† P^f_m },   ρ_i Gibbs state of H_i
    W(n, m) = E^i_n - E^f_m                              (work done by the system)
    ΔF      = F_f - F_i = -(1/β) ln(Z_f / Z_i)

The joint table is evaluated from the operator expression itself; the closed
forms (moment_closed_form) are kept separate so each can serve as the other's
oracle.

With W measured as work done by the system, ⟨e^{βW}⟩ = Z_f/Z_i = e^{-βΔF},
so the identity that holds for unequal spectra is ⟨e^{β(W+ΔF)}⟩ = 1. For equal
spectra ΔF = 0 and this is the same number as ⟨e^{β(W-ΔF)}⟩.
"""
from __future__ import annotations

import math
from typing import Dict, List

import numpy as np
from scipy.special import logsumexp

from packages.qubit_core.qubit_core import (
    dagger,
    exp_or_inf,
    log_level_populations,
    log_partition_function,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.logging import get_logger
from packages.shared.shared.types import OUTCOME_ORDER, SIGNS
from .models import (
    MAX_MOMENT_ORDER,
    WORK_MERGE_TOL,
    JointDistribution,
    ProtocolSpec,
    WorkDistribution,
    WorkValue,
)

logger = get_logger("tpm")


def _validate_order(k: int, name: str = "order") -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= int(k) <= MAX_MOMENT_ORDER:
        raise InvalidParameterError(name, f"must be an integer in [0, {MAX_MOMENT_ORDER}], got {k!r}")
    return int(k)


def joint_distribution(spec: ProtocolSpec) -> JointDistribution:
    rho = spec.initial_state.density.matrix
    u = spec.unitary().matrix
    u_dag = dagger(u)
    table = np.zeros((2, 2), dtype=float)
    for i, n in enumerate(SIGNS):
        p_i = spec.initial.projector(n).matrix
        # state after the first measurement, propagated (unnormalized)
        post = u @ p_i @ rho @ p_i @ u_dag
        for j, m in enumerate(SIGNS):
            p_f = spec.final.projector(m).matrix
            table[i, j] = max(0.0, float(np.real(np.trace(p_f @ post @ p_f))))
    return JointDistribution(table)


def work_distribution(spec: ProtocolSpec) -> WorkDistribution:
    joint = joint_distribution(spec)
    merged: List[List[float]] = []
    for (n, m), prob in joint.items():
        w = spec.work(n, m)
        for entry in merged:
            if abs(entry[0] - w) <= WORK_MERGE_TOL:
                entry[1] += prob
                break
        else:
            merged.append([w, prob])
    merged.sort(key=lambda e: -e[0])
    return WorkDistribution(tuple(WorkValue(w=w, prob=p) for w, p in merged))


def free_energy_difference(spec: ProtocolSpec) -> float:
    if spec.beta == 0.0 or spec.equal_spectra:
        return 0.0
    ln_zi = log_partition_function(spec.initial, spec.beta)
    ln_zf = log_partition_function(spec.final, spec.beta)
    return -(ln_zf - ln_zi) / spec.beta


def outcome_log_probabilities(spec: ProtocolSpec) -> np.ndarray:
    """
    ln p(n, m) in OUTCOME_ORDER, -inf on impossible pairs.

    ρ_i commutes with P^i_n, so p(n, m) = p_n · tr{P^f_m U P^i_n U†}; taking
    ln p_n from the level populations keeps the tail exact where p_n underflows.
    """
    log_pops = log_level_populations(spec.initial, spec.beta)
    u = spec.unitary().matrix
    u_dag = dagger(u)
    out = np.full(len(OUTCOME_ORDER), -np.inf)
    for k, (n, m) in enumerate(OUTCOME_ORDER):
        moved = u @ spec.initial.projector(n).matrix @ u_dag
        transition = float(np.real(np.trace(spec.final.projector(m).matrix @ moved)))
        if transition > 0.0:
            out[k] = log_pops[0 if n > 0 else 1] + math.log(transition)
    return out


def _log_exp_average(spec: ProtocolSpec, shift: float) -> float:
    """ln Σ p(n,m)·exp(β(W(n,m) + shift))."""
    exponents = outcome_log_probabilities(spec) + spec.beta * (outcome_works(spec) + shift)
    return float(logsumexp(exponents))


def jarzynski_average(spec: ProtocolSpec) -> float:
    """Σ p(n,m)·exp(β(W(n,m) + ΔF)), summed in log space."""
    if spec.beta == 0.0:
        return 1.0
    return exp_or_inf(_log_exp_average(spec, free_energy_difference(spec)))


def exponential_work_average(spec: ProtocolSpec) -> float:
    """⟨e^{βW}⟩, the experimentally accessible quantity (= e^{-βΔF}); inf past double range."""
    return exp_or_inf(_log_exp_average(spec, 0.0))


def work_moment(spec: ProtocolSpec, k: int) -> float:
    k = _validate_order(k, "k")
    if k == 0:
        return 1.0
    joint = joint_distribution(spec)
    return sum(prob * spec.work(n, m) ** k for (n, m), prob in joint.items())


def work_moments(spec: ProtocolSpec, orders: List[int]) -> Dict[int, float]:
    return {int(k): work_moment(spec, k) for k in orders}


def dissipated_work_average(spec: ProtocolSpec) -> float:
    """-⟨W⟩ - ΔF; nonnegative by Jensen's inequality applied to the Jarzynski identity."""
    return -work_moment(spec, 1) - free_energy_difference(spec)


def moment_closed_form(E: float, beta: float, c: float, n: int) -> float:
    """
    2^{n-1} E^n (1 - c) (e^{-βE} + (-1)^n e^{βE}) / (e^{-βE} + e^{βE})

    for equal spectra ±E, sudden quench, c = s^i·s^f. The hyperbolic ratio is
    exactly 1 for even n and -tanh(βE) for odd n.
    """
    if not (math.isfinite(E) and E > 0.0):
        raise InvalidParameterError("energy", f"must be finite and > 0, got {E!r}")
    if not (math.isfinite(beta) and beta >= 0.0):
        raise InvalidParameterError("beta", f"must be finite and >= 0, got {beta!r}")
    if not math.isfinite(c) or abs(c) > 1.0 + 1e-12:
        raise InvalidParameterError("c", f"overlap s^i·s^f must lie in [-1, 1], got {c!r}")
    n = _validate_order(n, "n")
    if n == 0:
        raise InvalidParameterError("n", "closed form is defined for n >= 1")
    parity = 1.0 if n % 2 == 0 else -math.tanh(beta * E)
    return 2.0 ** (n - 1) * E**n * (1.0 - c) * parity


def taylor_partial_sum(spec: ProtocolSpec, K: int) -> float:
    """Σ_{k=0}^{K} β^k/k! ⟨W^k⟩, which resums to ⟨e^{βW}⟩ = 1 for equal spectra."""
    K = _validate_order(K, "K")
    if not spec.equal_spectra:
        raise InvalidParameterError("spec", "resummation requires equal initial and final spectra")
    joint = joint_distribution(spec)
    total = 0.0
    coeff = 1.0  # β^k / k!
    for k in range(K + 1):
        if k > 0:
            coeff *= spec.beta / k
        moment = 1.0 if k == 0 else sum(prob * spec.work(n, m) ** k for (n, m), prob in joint.items())
        total += coeff * moment
    logger.debug("taylor partial sum K=%d beta=%.6g -> %.15g", K, spec.beta, total)
    return total


def outcome_works(spec: ProtocolSpec) -> np.ndarray:
    """W for each outcome pair in OUTCOME_ORDER."""
    return np.array([spec.work(n, m) for n, m in OUTCOME_ORDER], dtype=float)

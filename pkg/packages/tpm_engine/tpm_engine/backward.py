# packages/tpm_engine/tpm_engine/backward.py
"""
Backward protocol and Crooks ratios.

The backward run starts in the Gibbs state of H_f, measures P^f_m, evolves with
V and measures P^i_n. V defaults to the exact inverse U† of the forward
unitary; BackwardMode.INITIAL_HT uses e^{+iH_i t} for FinalGenerated runs, which
inverts U only when H_i = H_f.
"""
from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np

from packages.qubit_core.qubit_core import Unitary, dagger, exp_or_inf, unitary_from_hamiltonian
from packages.shared.shared.errors import DegenerateSupportError
from packages.shared.shared.logging import get_logger
from packages.shared.shared.types import OUTCOME_ORDER, SIGNS, Sign
from .models import BackwardMode, FinalGenerated, JointDistribution, ProtocolSpec
from .protocol import free_energy_difference, joint_distribution

logger = get_logger("tpm.backward")

# Backward probabilities at or below this are treated as exactly impossible.
SUPPORT_FLOOR = 1e-300


def backward_unitary(spec: ProtocolSpec, mode: BackwardMode = BackwardMode.EXACT_INVERSE) -> Unitary:
    mode = BackwardMode(mode)
    if mode is BackwardMode.INITIAL_HT and isinstance(spec.evolution, FinalGenerated):
        if spec.initial != spec.final:
            logger.warning(
                "initial-ht backward evolution e^{+iH_i t} is not the inverse of e^{-iH_f t} "
                "for distinct Hamiltonians; Crooks ratios will not match"
            )
        return unitary_from_hamiltonian(spec.initial, -spec.evolution.t)
    return spec.unitary().inverse()


def backward_joint_distribution(
    spec: ProtocolSpec,
    mode: BackwardMode = BackwardMode.EXACT_INVERSE,
) -> JointDistribution:
    """table[m, n] = p_B(m, n) = tr{ P^i_n V P^f_m ρ_f P^f_m V† P^i_n }."""
    rho_f = spec.final_state.density.matrix
    v = backward_unitary(spec, mode).matrix
    v_dag = dagger(v)
    table = np.zeros((2, 2), dtype=float)
    for j, m in enumerate(SIGNS):
        p_f = spec.final.projector(m).matrix
        post = v @ p_f @ rho_f @ p_f @ v_dag
        for i, n in enumerate(SIGNS):
            p_i = spec.initial.projector(n).matrix
            table[j, i] = max(0.0, float(np.real(np.trace(p_i @ post @ p_i))))
    return JointDistribution(table)


def crooks_ratio(
    spec: ProtocolSpec,
    n: Sign,
    m: Sign,
    *,
    mode: BackwardMode = BackwardMode.EXACT_INVERSE,
    forward: Optional[JointDistribution] = None,
    backward: Optional[JointDistribution] = None,
) -> float:
    """p_F(n, m) / p_B(m, n)."""
    forward = forward or joint_distribution(spec)
    backward = backward or backward_joint_distribution(spec, mode)
    p_b = backward.p(m, n)
    if p_b <= SUPPORT_FLOOR:
        raise DegenerateSupportError(n, m, p_b)
    return forward.p(n, m) / p_b


def crooks_expected(spec: ProtocolSpec, n: Sign, m: Sign) -> float:
    """e^{-β(W + ΔF)}; inf when the exponent leaves double range."""
    return exp_or_inf(-spec.beta * (spec.work(n, m) + free_energy_difference(spec)))


def crooks_table(
    spec: ProtocolSpec,
    mode: BackwardMode = BackwardMode.EXACT_INVERSE,
) -> List[Dict[str, Optional[float]]]:
    """One row per outcome pair; ratio is None on degenerate support."""
    forward = joint_distribution(spec)
    backward = backward_joint_distribution(spec, mode)
    rows: List[Dict[str, Optional[float]]] = []
    for n, m in OUTCOME_ORDER:
        try:
            ratio: Optional[float] = crooks_ratio(spec, n, m, forward=forward, backward=backward)
        except DegenerateSupportError:
            ratio = None
        rows.append(
            {
                "n": n,
                "m": m,
                "work": spec.work(n, m),
                "p_forward": forward.p(n, m),
                "p_backward": backward.p(m, n),
                "ratio": ratio,
                "expected": crooks_expected(spec, n, m),
            }
        )
    return rows

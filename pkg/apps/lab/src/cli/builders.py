"""Turn a validated RunRequest into domain objects."""
from __future__ import annotations

import math
from typing import Optional, Tuple

from packages.qubit_core.qubit_core import (
    X_AXIS,
    Z_AXIS,
    BlochVector,
    TwoLevelHamiltonian,
    bloch_from_angles,
    bloch_from_components,
    unitary_from_axis_angle,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.temporal_bell.temporal_bell import CHSHSettings, canonical_chsh_settings
from packages.tpm_engine.tpm_engine import Evolution, Explicit, FinalGenerated, ProtocolSpec, SuddenQuench
from packages.work_chsh.work_chsh import WorkBellSettings, optimal_work_settings
from schemas.documents import Components, RunRequest

DEFAULT_AXIS_I = Z_AXIS
DEFAULT_AXIS_F = X_AXIS


def axis_or(components: Optional[Components], default: BlochVector) -> BlochVector:
    if components is None:
        return default
    return bloch_from_components(*components)


def evolution_from(req: RunRequest) -> Evolution:
    if req.evolution == "quench":
        return SuddenQuench()
    if req.evolution == "final-ht":
        return FinalGenerated(req.time)
    if req.unitary is None:
        raise InvalidParameterError("unitary", "--evolution explicit needs --unitary theta,phi,alpha")
    theta, phi, alpha = req.unitary
    return Explicit(unitary_from_axis_angle(bloch_from_angles(theta, phi), alpha))


def protocol_from(req: RunRequest) -> ProtocolSpec:
    energy_final = req.energy if req.energy_final is None else req.energy_final
    return ProtocolSpec(
        initial=TwoLevelHamiltonian(req.energy, axis_or(req.axis_i, DEFAULT_AXIS_I)),
        final=TwoLevelHamiltonian(energy_final, axis_or(req.axis_f, DEFAULT_AXIS_F)),
        beta=req.beta,
        evolution=evolution_from(req),
    )


def _four_axes(req: RunRequest) -> Tuple[Optional[Components], ...]:
    return (req.axis_a1, req.axis_a2, req.axis_b1, req.axis_b2)


def chsh_from(req: RunRequest) -> CHSHSettings:
    axes = _four_axes(req)
    if req.optimal:
        if any(a is not None for a in axes):
            raise InvalidParameterError("optimal", "--optimal cannot be combined with explicit CHSH axes")
        return canonical_chsh_settings()
    missing = [name for name, a in zip(("a1", "a2", "b1", "b2"), axes) if a is None]
    if missing:
        raise InvalidParameterError("axes", f"missing --axis-{', --axis-'.join(missing)} (or pass --optimal)")
    a1, a2, b1, b2 = (bloch_from_components(*a) for a in axes)  # type: ignore[misc]
    return CHSHSettings(a1=a1, a2=a2, b1=b1, b2=b2)


def work_bell_from(req: RunRequest, order: int) -> WorkBellSettings:
    if req.energy_final is not None and req.energy_final != req.energy:
        raise InvalidParameterError("energy_final", "work-bell combinations share one spectrum ±E")
    if req.optimal:
        if any(a is not None for a in _four_axes(req)):
            raise InvalidParameterError("optimal", "--optimal cannot be combined with explicit CHSH axes")
        return WorkBellSettings.from_chsh(optimal_work_settings(req.energy, req.beta, order), req.energy, req.beta)
    return WorkBellSettings.from_chsh(chsh_from(req), req.energy, req.beta)


# Reference three-setting axes in the x-z plane: A = z, B₁ at 60°, B₂ at 120°.
THREE_SETTING_REFERENCE: Tuple[BlochVector, BlochVector, BlochVector] = (
    Z_AXIS,
    bloch_from_angles(math.pi / 3.0, 0.0),
    bloch_from_angles(2.0 * math.pi / 3.0, 0.0),
)


def three_setting_from(req: RunRequest) -> Tuple[BlochVector, BlochVector, BlochVector]:
    a_ref, b1_ref, b2_ref = THREE_SETTING_REFERENCE
    return (
        axis_or(req.axis_a1, a_ref),
        axis_or(req.axis_b1, b1_ref),
        axis_or(req.axis_b2, b2_ref),
    )

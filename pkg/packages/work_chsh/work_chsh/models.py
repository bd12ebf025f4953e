# packages/work_chsh/work_chsh/models.py
from __future__ import annotations

import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, field_validator

from packages.qubit_core.qubit_core import BlochVector, TwoLevelHamiltonian, validate_beta
from packages.shared.shared.errors import InvalidParameterError
from packages.temporal_bell.temporal_bell import TSIRELSON_BOUND, CHSHSettings
from packages.tpm_engine.tpm_engine import ProtocolSpec, SuddenQuench


@dataclass(frozen=True)
class WorkBellSettings:
    """
    Two initial axes (which also fix each run's thermal basis), two final axes,
    one energy E shared by the initial and final spectra, and β.
    """

    a1: BlochVector
    a2: BlochVector
    b1: BlochVector
    b2: BlochVector
    energy: float
    beta: float

    def __post_init__(self) -> None:
        energy = float(self.energy)
        if not math.isfinite(energy) or energy <= 0.0:
            raise InvalidParameterError("energy", f"must be finite and > 0, got {self.energy!r}")
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "beta", validate_beta(self.beta))

    @classmethod
    def from_chsh(cls, s: CHSHSettings, energy: float, beta: float) -> "WorkBellSettings":
        return cls(a1=s.a1, a2=s.a2, b1=s.b1, b2=s.b2, energy=energy, beta=beta)

    def chsh(self) -> CHSHSettings:
        return CHSHSettings(a1=self.a1, a2=self.a2, b1=self.b1, b2=self.b2)

    def with_beta(self, beta: float) -> "WorkBellSettings":
        return WorkBellSettings(self.a1, self.a2, self.b1, self.b2, self.energy, beta)

    def pair_spec(self, initial_axis: BlochVector, final_axis: BlochVector) -> ProtocolSpec:
        """Equal-spectra sudden-quench run measuring initial_axis then final_axis."""
        return ProtocolSpec(
            initial=TwoLevelHamiltonian(self.energy, initial_axis),
            final=TwoLevelHamiltonian(self.energy, final_axis),
            beta=self.beta,
            evolution=SuddenQuench(),
        )


class MomentCombination(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int = Field(ge=1)
    value: float
    chsh_bloch_term: float

    @field_validator("chsh_bloch_term")
    @classmethod
    def _within_tsirelson(cls, v: float) -> float:
        if abs(v) > TSIRELSON_BOUND + 1e-9:
            raise ValueError(f"CHSH Bloch term {v} exceeds the Tsirelson bound")
        return v

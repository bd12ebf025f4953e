# packages/qubit_core/qubit_core/thermal.py
"""
Two-level Hamiltonians H = E·(s·σ), their Gibbs states and generated unitaries.

Boltzmann's constant is 1 throughout (β = 1/T). β = 0 is legal everywhere a
finite formula exists; β < 0 and non-finite β are rejected.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import expit, log_expit

from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.types import Sign
from .bloch import BlochVector
from .operators import (
    DensityOperator,
    Operator2,
    Projector,
    Unitary,
    bloch_to_projector,
    pauli_expansion,
    sigma_dot,
    unitary_from_axis_angle,
)


# ln of the largest finite double
LOG_FLOAT_MAX = math.log(sys.float_info.max)


def exp_or_inf(x: float) -> float:
    return math.inf if x > LOG_FLOAT_MAX else math.exp(x)


def validate_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0.0:
        raise InvalidParameterError("beta", f"must be finite and >= 0, got {beta!r}")
    return beta


@dataclass(frozen=True)
class TwoLevelHamiltonian:
    energy: float
    axis: BlochVector

    def __post_init__(self) -> None:
        energy = float(self.energy)
        if not math.isfinite(energy) or energy <= 0.0:
            raise InvalidParameterError("energy", f"must be finite and > 0, got {self.energy!r}")
        object.__setattr__(self, "energy", energy)

    @property
    def matrix(self) -> Operator2:
        return sigma_dot(self.axis, self.energy)

    def level(self, sign: Sign) -> float:
        """Eigenenergy attached to the projector (I + sign·s·σ)/2."""
        return sign * self.energy

    def projector(self, sign: Sign) -> Projector:
        return bloch_to_projector(self.axis, sign)


def log_partition_function(h: TwoLevelHamiltonian, beta: float) -> float:
    """ln Z = ln(2 cosh βE), overflow-free."""
    x = validate_beta(beta) * h.energy
    return float(np.logaddexp(x, -x))


def partition_function(h: TwoLevelHamiltonian, beta: float) -> float:
    """Z = 2 cosh βE; inf once βE leaves double range."""
    return exp_or_inf(log_partition_function(h, beta))


def free_energy(h: TwoLevelHamiltonian, beta: float) -> float:
    """F = -(1/β) ln Z."""
    beta = validate_beta(beta)
    if beta == 0.0:
        raise InvalidParameterError("beta", "free energy diverges at beta = 0")
    return -log_partition_function(h, beta) / beta


def level_populations(h: TwoLevelHamiltonian, beta: float) -> tuple[float, float]:
    """(p₊, p₋) = (e^{-βE}, e^{+βE}) / Z for the levels ±E."""
    x = 2.0 * validate_beta(beta) * h.energy
    return float(expit(-x)), float(expit(x))


def log_level_populations(h: TwoLevelHamiltonian, beta: float) -> tuple[float, float]:
    """(ln p₊, ln p₋), finite for every finite β even where p₊ underflows to 0."""
    x = 2.0 * validate_beta(beta) * h.energy
    return float(log_expit(-x)), float(log_expit(x))


def thermal_density(h: TwoLevelHamiltonian, beta: float) -> DensityOperator:
    p_plus, p_minus = level_populations(h, beta)
    # p₊P₊ + p₋P₋ = I/2 + (p₊ - p₋)/2 · s·σ
    half_gap = 0.5 * (p_plus - p_minus)
    return DensityOperator(pauli_expansion(0.5, [half_gap * v for v in h.axis]))


@dataclass(frozen=True)
class ThermalState:
    hamiltonian: TwoLevelHamiltonian
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", validate_beta(self.beta))

    @property
    def partition_function(self) -> float:
        return partition_function(self.hamiltonian, self.beta)

    @property
    def log_partition_function(self) -> float:
        return log_partition_function(self.hamiltonian, self.beta)

    @cached_property
    def density(self) -> DensityOperator:
        return thermal_density(self.hamiltonian, self.beta)

    def population(self, sign: Sign) -> float:
        p_plus, p_minus = level_populations(self.hamiltonian, self.beta)
        return p_plus if sign > 0 else p_minus


def unitary_from_hamiltonian(h: TwoLevelHamiltonian, t: float) -> Unitary:
    """exp(-iHt) = cos(Et)·I - i·sin(Et)·(s·σ)."""
    t = float(t)
    if not math.isfinite(t):
        raise InvalidParameterError("time", f"must be finite, got {t!r}")
    return unitary_from_axis_angle(h.axis, h.energy * t)

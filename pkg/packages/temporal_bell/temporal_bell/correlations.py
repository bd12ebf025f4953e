# packages/temporal_bell/temporal_bell/correlations.py
"""
Two-time correlations on one qubit.

A is measured first and B second on the same system. The sequential outcome
probabilities are evaluated from the operator expression; the correlator
always reduces to a·b whatever the state.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from packages.qubit_core.qubit_core import (
    MAXIMALLY_MIXED,
    BlochVector,
    DensityOperator,
    bloch_from_components,
    bloch_to_projector,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.types import SIGNS, Convention

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
CLASSICAL_CHSH_BOUND = 2.0
# Strict-violation slack for the three-setting predicate.
VIOLATION_SLACK = 1e-12


@dataclass(frozen=True)
class TwoTimeSetting:
    first: BlochVector
    second: BlochVector
    state: DensityOperator = MAXIMALLY_MIXED


@dataclass(frozen=True)
class CHSHSettings:
    a1: BlochVector
    a2: BlochVector
    b1: BlochVector
    b2: BlochVector

    def bloch_term(self) -> float:
        """a₁·b₁ + a₁·b₂ + a₂·b₁ - a₂·b₂."""
        return (
            self.a1.dot(self.b1)
            + self.a1.dot(self.b2)
            + self.a2.dot(self.b1)
            - self.a2.dot(self.b2)
        )

    def pairs(self) -> Tuple[Tuple[BlochVector, BlochVector, int], ...]:
        """(first, second, CHSH sign) in the order A₁B₁, A₁B₂, A₂B₁, A₂B₂."""
        return (
            (self.a1, self.b1, 1),
            (self.a1, self.b2, 1),
            (self.a2, self.b1, 1),
            (self.a2, self.b2, -1),
        )

    def with_final_negated(self) -> "CHSHSettings":
        return CHSHSettings(self.a1, self.a2, self.b1.negated(), self.b2.negated())


def canonical_chsh_settings() -> CHSHSettings:
    """A₁ = Z, A₂ = (Z+X)/√2, B₁ = Z, B₂ = (Z-X)/√2."""
    r = 1.0 / math.sqrt(2.0)
    return CHSHSettings(
        a1=bloch_from_components(0.0, 0.0, 1.0),
        a2=bloch_from_components(r, 0.0, r),
        b1=bloch_from_components(0.0, 0.0, 1.0),
        b2=bloch_from_components(-r, 0.0, r),
    )


def sequential_probabilities(setting: TwoTimeSetting) -> np.ndarray:
    """q[i, j] = tr{ P^b_β P^a_α ρ P^a_α } for α = SIGNS[i], β = SIGNS[j]."""
    rho = setting.state.matrix
    q = np.zeros((2, 2), dtype=float)
    for i, alpha in enumerate(SIGNS):
        pa = bloch_to_projector(setting.first, alpha).matrix
        post = pa @ rho @ pa
        for j, beta in enumerate(SIGNS):
            pb = bloch_to_projector(setting.second, beta).matrix
            q[i, j] = float(np.real(np.trace(pb @ post)))
    return q


def two_time_correlation(setting: TwoTimeSetting) -> float:
    q = sequential_probabilities(setting)
    return float(sum(alpha * beta * q[i, j] for i, alpha in enumerate(SIGNS) for j, beta in enumerate(SIGNS)))


def chsh_value(state: DensityOperator, s: CHSHSettings) -> float:
    total = 0.0
    for first, second, sign in s.pairs():
        total += sign * two_time_correlation(TwoTimeSetting(first, second, state))
    return total


def chsh_closed_form(s: CHSHSettings) -> float:
    return s.bloch_term()


# ---------- classical (deterministic ±1) strategies ----------

@dataclass(frozen=True)
class ClassicalStrategy:
    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "b1", "b2"):
            if getattr(self, name) not in (1, -1):
                raise InvalidParameterError(name, "classical values must be +1 or -1")

    def value(self) -> int:
        return self.a1 * self.b1 + self.a2 * self.b1 + self.a1 * self.b2 - self.a2 * self.b2


def enumerate_classical_strategies() -> List[ClassicalStrategy]:
    return [ClassicalStrategy(*values) for values in itertools.product(SIGNS, repeat=4)]


def classical_chsh_bound() -> Tuple[float, ClassicalStrategy]:
    best = max(enumerate_classical_strategies(), key=lambda s: s.value())
    return float(best.value()), best


def classical_chsh_range() -> Tuple[float, float]:
    values = [s.value() for s in enumerate_classical_strategies()]
    return float(min(values)), float(max(values))


# ---------- three-setting form ----------

@dataclass(frozen=True)
class ThreeSettingResult:
    lhs: float
    rhs: float
    violated: bool
    convention: Convention


def _three_setting_lhs(b1b2: float, convention: Convention) -> float:
    if convention == "plus":
        return 1.0 + b1b2
    if convention == "minus":
        return 1.0 - b1b2
    raise InvalidParameterError("convention", f"expected 'plus' or 'minus', got {convention!r}")


def three_setting_bell(
    state: DensityOperator,
    a: BlochVector,
    b1: BlochVector,
    b2: BlochVector,
    convention: Convention = "minus",
) -> ThreeSettingResult:
    """
    plus:  1 + ⟨B₁B₂⟩ ≥ |⟨AB₁⟩ - ⟨AB₂⟩|   (anticorrelated-pair form)
    minus: 1 - ⟨B₁B₂⟩ ≥ |⟨AB₁⟩ - ⟨AB₂⟩|   (same-system sequential form)
    """
    ab1 = two_time_correlation(TwoTimeSetting(a, b1, state))
    ab2 = two_time_correlation(TwoTimeSetting(a, b2, state))
    b1b2 = two_time_correlation(TwoTimeSetting(b1, b2, state))
    lhs = _three_setting_lhs(b1b2, convention)
    rhs = abs(ab1 - ab2)
    return ThreeSettingResult(lhs=lhs, rhs=rhs, violated=lhs < rhs - VIOLATION_SLACK, convention=convention)


@dataclass(frozen=True)
class ThreeSettingCheck:
    a: int
    b1: int
    b2: int
    lhs: float
    rhs: float
    holds: bool


def classical_three_setting_check(convention: Convention = "minus") -> List[ThreeSettingCheck]:
    """Evaluate the inequality on all 8 deterministic (A, B₁, B₂) assignments."""
    rows: List[ThreeSettingCheck] = []
    for a, b1, b2 in itertools.product(SIGNS, repeat=3):
        lhs = _three_setting_lhs(float(b1 * b2), convention)
        rhs = float(abs(a * b1 - a * b2))
        rows.append(ThreeSettingCheck(a, b1, b2, lhs, rhs, lhs >= rhs))
    return rows


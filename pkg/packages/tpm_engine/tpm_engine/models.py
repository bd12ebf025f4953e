# packages/tpm_engine/tpm_engine/models.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, Tuple, Union

import numpy as np

from packages.qubit_core.qubit_core import (
    IDENTITY_UNITARY,
    ThermalState,
    TwoLevelHamiltonian,
    Unitary,
    random_bloch,
    random_unitary,
    unitary_from_hamiltonian,
    validate_beta,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.types import OUTCOME_ORDER, OutcomePair, Sign, sign_label

PROBABILITY_TOL = 1e-12
# W values closer than this are one support point of the work distribution.
WORK_MERGE_TOL = 1e-9
MAX_MOMENT_ORDER = 60


# ---------- evolution between the two measurements ----------

@dataclass(frozen=True)
class SuddenQuench:
    """U = I."""

    kind: str = field(default="quench", init=False)


@dataclass(frozen=True)
class FinalGenerated:
    """U = exp(-i H_f t)."""

    t: float
    kind: str = field(default="final-ht", init=False)

    def __post_init__(self) -> None:
        if not math.isfinite(float(self.t)):
            raise InvalidParameterError("time", f"must be finite, got {self.t!r}")


@dataclass(frozen=True)
class Explicit:
    unitary: Unitary
    kind: str = field(default="explicit", init=False)


Evolution = Union[SuddenQuench, FinalGenerated, Explicit]


class BackwardMode(str, Enum):
    EXACT_INVERSE = "exact"
    # e^{+iH_i t}; an inverse of the forward unitary only when H_i = H_f
    INITIAL_HT = "initial-ht"


# ---------- protocol ----------

@dataclass(frozen=True)
class ProtocolSpec:
    initial: TwoLevelHamiltonian
    final: TwoLevelHamiltonian
    beta: float
    evolution: Evolution = field(default_factory=SuddenQuench)

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", validate_beta(self.beta))
        if not isinstance(self.evolution, (SuddenQuench, FinalGenerated, Explicit)):
            raise InvalidParameterError("evolution", f"unsupported evolution {self.evolution!r}")

    @property
    def equal_spectra(self) -> bool:
        return self.initial.energy == self.final.energy

    @property
    def initial_state(self) -> ThermalState:
        return ThermalState(self.initial, self.beta)

    @property
    def final_state(self) -> ThermalState:
        return ThermalState(self.final, self.beta)

    def unitary(self) -> Unitary:
        ev = self.evolution
        if isinstance(ev, SuddenQuench):
            return IDENTITY_UNITARY
        if isinstance(ev, FinalGenerated):
            return unitary_from_hamiltonian(self.final, ev.t)
        return ev.unitary

    def work(self, n: Sign, m: Sign) -> float:
        """W = E^i_n - E^f_m, the work done by the system."""
        return self.initial.level(n) - self.final.level(m)


def _index(sign: Sign) -> int:
    return 0 if sign > 0 else 1


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """
    2x2 table of sequential outcome probabilities.

    table[i, j] is the probability that the first measurement gives sign i and
    the second gives sign j (index 0 is +, index 1 is -). For a forward run the
    first measurement is the initial-energy one (n); for a backward run it is
    the final-energy one (m).
    """

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=float)
        if t.shape != (2, 2):
            raise InvalidParameterError("table", f"expected shape (2, 2), got {t.shape}")
        if np.any(t < -PROBABILITY_TOL) or np.any(t > 1.0 + PROBABILITY_TOL):
            raise InvalidParameterError("table", "entries must lie in [0, 1]")
        if abs(float(t.sum()) - 1.0) > PROBABILITY_TOL:
            raise InvalidParameterError("table", f"entries sum to {t.sum():.15g}, expected 1")
        t = np.clip(t, 0.0, 1.0)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def p(self, first: Sign, second: Sign) -> float:
        return float(self.table[_index(first), _index(second)])

    def items(self) -> Iterator[Tuple[OutcomePair, float]]:
        for pair in OUTCOME_ORDER:
            yield pair, self.p(*pair)

    def first_marginal(self) -> Tuple[float, float]:
        rows = self.table.sum(axis=1)
        return float(rows[0]), float(rows[1])

    def as_dict(self) -> Dict[str, float]:
        return {f"p({sign_label(a)},{sign_label(b)})": prob for (a, b), prob in self.items()}


@dataclass(frozen=True)
class WorkValue:
    w: float
    prob: float


@dataclass(frozen=True)
class WorkDistribution:
    """Work support points ordered by descending w."""

    values: Tuple[WorkValue, ...]

    def __iter__(self) -> Iterator[WorkValue]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def total(self) -> float:
        return sum(v.prob for v in self.values)

    def prob_of(self, w: float, tol: float = WORK_MERGE_TOL) -> float:
        return sum(v.prob for v in self.values if abs(v.w - w) <= tol)


def random_protocol(
    rng: np.random.Generator,
    *,
    beta_max: float = 3.0,
    energy_max: float = 2.0,
    evolution: str = "explicit",
) -> ProtocolSpec:
    """Random spec: axes uniform on the sphere, E in (0, energy_max], β in [0, beta_max]."""
    e_i = energy_max - float(rng.uniform(0.0, energy_max))
    e_f = energy_max - float(rng.uniform(0.0, energy_max))
    beta = float(rng.uniform(0.0, beta_max))
    ev: Evolution
    if evolution == "explicit":
        ev = Explicit(random_unitary(rng))
    elif evolution == "final-ht":
        ev = FinalGenerated(float(rng.uniform(0.0, 10.0)))
    elif evolution == "quench":
        ev = SuddenQuench()
    else:
        raise InvalidParameterError("evolution", f"unknown evolution '{evolution}'")
    return ProtocolSpec(
        initial=TwoLevelHamiltonian(e_i, random_bloch(rng)),
        final=TwoLevelHamiltonian(e_f, random_bloch(rng)),
        beta=beta,
        evolution=ev,
    )

# packages/qubit_core/qubit_core/bloch.py
"""
Bloch-sphere directions for dichotomic qubit observables.

A BlochVector fixes the observable s·σ, its ±1 eigenprojectors and the axis of
a two-level Hamiltonian. Raw components are validated, never silently repaired
beyond float rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from packages.shared.shared.errors import InvalidBlochVectorError, InvalidParameterError

# Components farther than this from the unit sphere are treated as caller bugs.
NORM_REJECT_TOL = 1e-6
NORM_TOL = 1e-10


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        comps = (float(self.x), float(self.y), float(self.z))
        if not all(math.isfinite(c) for c in comps):
            raise InvalidBlochVectorError(comps, float("nan"))
        norm = math.sqrt(comps[0] ** 2 + comps[1] ** 2 + comps[2] ** 2)
        if abs(norm - 1.0) > NORM_REJECT_TOL:
            raise InvalidBlochVectorError(comps, norm)
        # rounding-level drift only (|norm - 1| <= 1e-6)
        object.__setattr__(self, "x", comps[0] / norm)
        object.__setattr__(self, "y", comps[1] / norm)
        object.__setattr__(self, "z", comps[2] / norm)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def negated(self) -> "BlochVector":
        return BlochVector(-self.x, -self.y, -self.z)

    def angles(self) -> Tuple[float, float]:
        """(theta, phi) with theta in [0, pi] and phi in [0, 2pi)."""
        theta = math.acos(max(-1.0, min(1.0, self.z)))
        phi = math.atan2(self.y, self.x) % (2.0 * math.pi)
        return theta, phi


def bloch_from_components(x: float, y: float, z: float) -> BlochVector:
    return BlochVector(x, y, z)


def bloch_from_angles(theta: float, phi: float) -> BlochVector:
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise InvalidParameterError("angles", f"non-finite theta={theta!r} phi={phi!r}")
    two_pi = 2.0 * math.pi
    theta = theta % two_pi
    if theta > math.pi:
        theta = two_pi - theta
        phi = phi + math.pi
    phi = phi % two_pi
    s = math.sin(theta)
    return BlochVector(s * math.cos(phi), s * math.sin(phi), math.cos(theta))


def bloch_dot(a: BlochVector, b: BlochVector) -> float:
    return a.dot(b)


X_AXIS = BlochVector(1.0, 0.0, 0.0)
Y_AXIS = BlochVector(0.0, 1.0, 0.0)
Z_AXIS = BlochVector(0.0, 0.0, 1.0)

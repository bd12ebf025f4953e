# packages/qubit_core/qubit_core/operators.py
"""
2x2 operators in the Pauli basis.

Operator2 is a plain complex128 (2, 2) numpy array. The role wrappers
(DensityOperator, Projector, Unitary) validate their invariant once at
construction and freeze the underlying buffer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt
from typing_extensions import TypeAlias

from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.types import Sign
from .bloch import BlochVector

Operator2: TypeAlias = npt.NDArray[np.complex128]

OPERATOR_TOL = 1e-10
SCALAR_TOL = 1e-12

IDENTITY: Operator2 = np.eye(2, dtype=np.complex128)
SIGMA_X: Operator2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y: Operator2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z: Operator2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)

for _m in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


def _frozen(matrix: npt.ArrayLike) -> Operator2:
    out = np.array(matrix, dtype=np.complex128)
    if out.shape != (2, 2):
        raise InvalidParameterError("matrix", f"expected shape (2, 2), got {out.shape}")
    out.setflags(write=False)
    return out


def pauli_expansion(c0: complex, c: Sequence[complex]) -> Operator2:
    """c0·I + c·σ, written out entrywise."""
    cx, cy, cz = (complex(v) for v in c)
    return _frozen(
        [
            [c0 + cz, cx - 1j * cy],
            [cx + 1j * cy, c0 - cz],
        ]
    )


def sigma_dot(axis: BlochVector, scale: float = 1.0) -> Operator2:
    """scale·(s·σ)."""
    return pauli_expansion(0.0, [scale * v for v in axis.as_tuple()])


def dagger(op: Operator2) -> Operator2:
    return _frozen(np.conj(op).T)


def bloch_components(op: Operator2) -> tuple[complex, np.ndarray]:
    """Inverse of pauli_expansion: returns (c0, c) with op = c0·I + c·σ."""
    c0 = 0.5 * (op[0, 0] + op[1, 1])
    cx = 0.5 * (op[0, 1] + op[1, 0])
    cy = 0.5j * (op[0, 1] - op[1, 0])
    cz = 0.5 * (op[0, 0] - op[1, 1])
    return c0, np.array([cx, cy, cz])


def is_hermitian(op: Operator2, tol: float = OPERATOR_TOL) -> bool:
    return bool(np.max(np.abs(op - np.conj(op).T)) <= tol)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: Operator2

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if not is_hermitian(m):
            raise InvalidParameterError("density", "matrix is not Hermitian")
        trace = complex(m[0, 0] + m[1, 1])
        if abs(trace - 1.0) > OPERATOR_TOL:
            raise InvalidParameterError("density", f"trace {trace:.12g} != 1")
        # eigenvalues of a unit-trace 2x2 Hermitian matrix are (1 ± |r|)/2
        if np.linalg.norm(_bloch_real(m)) > 1.0 + 2 * OPERATOR_TOL:
            raise InvalidParameterError("density", "negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @property
    def bloch(self) -> np.ndarray:
        return _bloch_real(self.matrix)

    def eigenvalues(self) -> tuple[float, float]:
        r = float(np.linalg.norm(self.bloch))
        return 0.5 * (1.0 - r), 0.5 * (1.0 + r)

    def expectation(self, op: Operator2) -> complex:
        return complex(np.trace(self.matrix @ op))


def _bloch_real(m: Operator2) -> np.ndarray:
    _, c = bloch_components(m)
    return 2.0 * np.real(c)


def density_from_bloch(r: Sequence[float]) -> DensityOperator:
    vec = np.asarray(r, dtype=float)
    if vec.shape != (3,):
        raise InvalidParameterError("bloch", f"expected 3 components, got shape {vec.shape}")
    if float(np.linalg.norm(vec)) > 1.0 + 1e-12:
        raise InvalidParameterError("bloch", "state vector lies outside the Bloch ball")
    return DensityOperator(pauli_expansion(0.5, 0.5 * vec))


MAXIMALLY_MIXED = DensityOperator(IDENTITY / 2)


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: Operator2
    axis: BlochVector
    sign: Sign

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if self.sign not in (1, -1):
            raise InvalidParameterError("sign", f"expected +1 or -1, got {self.sign!r}")
        expected = pauli_expansion(0.5, [0.5 * self.sign * v for v in self.axis])
        if np.max(np.abs(m - expected)) > OPERATOR_TOL:
            raise InvalidParameterError("projector", "matrix does not match (I + sign·axis·σ)/2")
        object.__setattr__(self, "matrix", m)


def bloch_to_projector(s: BlochVector, sign: Sign) -> Projector:
    if not isinstance(s, BlochVector):
        raise InvalidParameterError("axis", f"expected BlochVector, got {type(s).__name__}")
    if sign not in (1, -1):
        raise InvalidParameterError("sign", f"expected +1 or -1, got {sign!r}")
    half = 0.5 * sign
    return Projector(pauli_expansion(0.5, (half * s.x, half * s.y, half * s.z)), s, sign)


def projector_overlap(p: Projector, q: Projector) -> float:
    return 0.5 * (1.0 + p.sign * q.sign * p.axis.dot(q.axis))


def trace_product(*ops: Operator2) -> complex:
    acc = IDENTITY
    for op in ops:
        acc = acc @ op
    return complex(acc[0, 0] + acc[1, 1])


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: Operator2

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if np.max(np.abs(m @ np.conj(m).T - IDENTITY)) > OPERATOR_TOL:
            raise InvalidParameterError("unitary", "U·U† deviates from the identity")
        object.__setattr__(self, "matrix", m)

    def inverse(self) -> "Unitary":
        return Unitary(dagger(self.matrix))

    def compose(self, other: "Unitary") -> "Unitary":
        """self·other (other acts first)."""
        return Unitary(self.matrix @ other.matrix)


IDENTITY_UNITARY = Unitary(IDENTITY)


def unitary_from_axis_angle(axis: BlochVector, angle: float) -> Unitary:
    """exp(-i·angle·axis·σ) = cos(angle)·I - i·sin(angle)·axis·σ."""
    if not math.isfinite(angle):
        raise InvalidParameterError("angle", f"non-finite value {angle!r}")
    c, s = math.cos(angle), math.sin(angle)
    return Unitary(pauli_expansion(c, (-1j * s * axis.x, -1j * s * axis.y, -1j * s * axis.z)))

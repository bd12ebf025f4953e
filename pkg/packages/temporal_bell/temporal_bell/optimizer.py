# packages/temporal_bell/temporal_bell/optimizer.py
"""
Derivative-free maximization over measurement-axis angles.

Coordinate-wise bounded golden-section/Brent line searches
(scipy.optimize.minimize_scalar, method="bounded") sweep the angle vector
until a full sweep improves the best value by less than `tol`. Restarts draw
uniform angles from a Philox stream keyed by (seed, restart index), so the
result does not depend on how many workers run the restarts. Merging keeps the
best value, ties going to the lowest restart index.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from packages.qubit_core.qubit_core import bloch_from_angles
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.logging import get_logger
from .correlations import CHSHSettings

logger = get_logger("bell.optimizer")

TWO_PI = 2.0 * math.pi
SWEEP_TOL = 1e-12
LINE_XATOL = 1e-8
DEFAULT_MAX_SWEEPS = 400

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class OptimizationResult:
    x: np.ndarray
    value: float
    restart: int
    sweeps: int


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(restart),))))


def coordinate_ascent(
    objective: Objective,
    x0: Sequence[float],
    *,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    tol: float = SWEEP_TOL,
) -> tuple[np.ndarray, float, int]:
    x = np.array(x0, dtype=float)
    best = float(objective(x))
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        start_value = best
        for i in range(x.size):
            centre = float(x[i])

            def line(t: float, i: int = i) -> float:
                trial = x.copy()
                trial[i] = t
                return -float(objective(trial))

            res = minimize_scalar(
                line,
                bounds=(centre - math.pi, centre + math.pi),
                method="bounded",
                options={"xatol": LINE_XATOL},
            )
            # a line search never moves to a worse point
            if -float(res.fun) > best:
                x[i] = float(res.x) % TWO_PI
                best = -float(res.fun)
        if best - start_value < tol:
            break
    return x, best, sweeps


def maximize_angles(
    objective: Objective,
    dim: int,
    *,
    restarts: int,
    seed: int,
    start: Optional[Sequence[float]] = None,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    workers: int = 1,
) -> OptimizationResult:
    if int(restarts) < 1:
        raise InvalidParameterError("restarts", f"must be >= 1, got {restarts!r}")
    if int(workers) < 1:
        raise InvalidParameterError("workers", f"must be >= 1, got {workers!r}")
    if start is not None and len(start) != dim:
        raise InvalidParameterError("start", f"expected {dim} angles, got {len(start)}")

    def run(r: int) -> OptimizationResult:
        if r == 0 and start is not None:
            x0 = np.array(start, dtype=float)
        else:
            x0 = restart_rng(seed, r).uniform(0.0, TWO_PI, size=dim)
        x, value, sweeps = coordinate_ascent(objective, x0, max_sweeps=max_sweeps)
        logger.debug("restart %d: value=%.15g after %d sweeps", r, value, sweeps)
        return OptimizationResult(x=x, value=value, restart=r, sweeps=sweeps)

    indices = range(int(restarts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            results: List[OptimizationResult] = list(pool.map(run, indices))
    else:
        results = [run(r) for r in indices]

    best = results[0]
    for res in results[1:]:
        if res.value > best.value:
            best = res
    return best


# ---------- four-axis parametrization shared by the CHSH-type objectives ----------

def _unit(theta: float, phi: float) -> tuple[float, float, float]:
    s = math.sin(theta)
    return (s * math.cos(phi), s * math.sin(phi), math.cos(theta))


def _dot(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@dataclass(frozen=True)
class AxisParametrization:
    """
    Angle vector -> (a₁, a₂, b₁, b₂).

    coplanar: each axis is (sin θ, 0, cos θ) in the x-z plane (one angle per axis).
    tie_first: a₂ is the same axis as a₁.
    """

    coplanar: bool = False
    tie_first: bool = False

    @property
    def per_axis(self) -> int:
        return 1 if self.coplanar else 2

    @property
    def dim(self) -> int:
        return self.per_axis * (3 if self.tie_first else 4)

    def _split(self, x: Sequence[float]) -> List[tuple[float, float]]:
        k = self.per_axis
        angles = []
        for j in range(len(x) // k):
            if self.coplanar:
                angles.append((float(x[j]), 0.0))
            else:
                angles.append((float(x[k * j]), float(x[k * j + 1])))
        if self.tie_first:
            angles.insert(1, angles[0])
        return angles

    def vectors(self, x: Sequence[float]) -> List[tuple[float, float, float]]:
        return [_unit(t, p) for t, p in self._split(x)]

    def bloch_term(self, x: Sequence[float]) -> float:
        a1, a2, b1, b2 = self.vectors(x)
        return _dot(a1, b1) + _dot(a1, b2) + _dot(a2, b1) - _dot(a2, b2)

    def settings(self, x: Sequence[float]) -> CHSHSettings:
        a1, a2, b1, b2 = (bloch_from_angles(t, p) for t, p in self._split(x))
        return CHSHSettings(a1=a1, a2=a2, b1=b1, b2=b2)

    def encode(self, s: CHSHSettings) -> np.ndarray:
        axes = [s.a1, s.b1, s.b2] if self.tie_first else [s.a1, s.a2, s.b1, s.b2]
        out: List[float] = []
        for axis in axes:
            if self.coplanar:
                if abs(axis.y) > 1e-12:
                    raise InvalidParameterError("start", "coplanar start axes must lie in the x-z plane")
                out.append(math.atan2(axis.x, axis.z))
            else:
                out.extend(axis.angles())
        return np.array(out, dtype=float)


@dataclass(frozen=True)
class TsirelsonResult:
    settings: CHSHSettings
    value: float
    restart: int


def tsirelson_optimize(
    restarts: int,
    seed: int,
    *,
    start: Optional[CHSHSettings] = None,
    coplanar: bool = False,
    tie_first: bool = False,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    workers: int = 1,
) -> TsirelsonResult:
    """Maximize a₁·b₁ + a₁·b₂ + a₂·b₁ - a₂·b₂ over the four axes."""
    param = AxisParametrization(coplanar=coplanar, tie_first=tie_first)
    best = maximize_angles(
        param.bloch_term,
        param.dim,
        restarts=restarts,
        seed=seed,
        start=None if start is None else param.encode(start),
        max_sweeps=max_sweeps,
        workers=workers,
    )
    settings = param.settings(best.x)
    return TsirelsonResult(settings=settings, value=settings.bloch_term(), restart=best.restart)

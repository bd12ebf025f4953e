# packages/qubit_core/qubit_core/random_states.py
from __future__ import annotations

import math

import numpy as np

from .bloch import BlochVector
from .operators import DensityOperator, Unitary, density_from_bloch, unitary_from_axis_angle


def random_bloch(rng: np.random.Generator) -> BlochVector:
    """Uniform direction on the sphere (normalized Gaussian triple)."""
    while True:
        v = rng.standard_normal(3)
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            v = v / norm
            return BlochVector(float(v[0]), float(v[1]), float(v[2]))


def random_density(rng: np.random.Generator) -> DensityOperator:
    """Uniform point in the Bloch ball."""
    direction = random_bloch(rng).as_array()
    radius = float(rng.random()) ** (1.0 / 3.0)
    return density_from_bloch(radius * direction)


def random_unitary(rng: np.random.Generator) -> Unitary:
    return unitary_from_axis_angle(random_bloch(rng), float(rng.uniform(0.0, 2.0 * math.pi)))

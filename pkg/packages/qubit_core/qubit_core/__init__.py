"""
Qubit Core Package
Closed-form Bloch-representation algebra for single-qubit states, projectors,
thermal states and unitaries
"""

from .bloch import (
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    BlochVector,
    bloch_dot,
    bloch_from_angles,
    bloch_from_components,
)
from .operators import (
    IDENTITY,
    IDENTITY_UNITARY,
    MAXIMALLY_MIXED,
    OPERATOR_TOL,
    SCALAR_TOL,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityOperator,
    Operator2,
    Projector,
    Unitary,
    bloch_to_projector,
    dagger,
    density_from_bloch,
    pauli_expansion,
    projector_overlap,
    sigma_dot,
    trace_product,
    unitary_from_axis_angle,
)
from .random_states import random_bloch, random_density, random_unitary
from .thermal import (
    LOG_FLOAT_MAX,
    ThermalState,
    TwoLevelHamiltonian,
    exp_or_inf,
    free_energy,
    level_populations,
    log_level_populations,
    log_partition_function,
    partition_function,
    thermal_density,
    unitary_from_hamiltonian,
    validate_beta,
)

__all__ = [
    "X_AXIS",
    "Y_AXIS",
    "Z_AXIS",
    "BlochVector",
    "bloch_dot",
    "bloch_from_angles",
    "bloch_from_components",
    "IDENTITY",
    "IDENTITY_UNITARY",
    "MAXIMALLY_MIXED",
    "OPERATOR_TOL",
    "SCALAR_TOL",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "DensityOperator",
    "Operator2",
    "Projector",
    "Unitary",
    "bloch_to_projector",
    "dagger",
    "density_from_bloch",
    "pauli_expansion",
    "projector_overlap",
    "sigma_dot",
    "trace_product",
    "unitary_from_axis_angle",
    "random_bloch",
    "random_density",
    "random_unitary",
    "LOG_FLOAT_MAX",
    "ThermalState",
    "TwoLevelHamiltonian",
    "exp_or_inf",
    "free_energy",
    "level_populations",
    "log_level_populations",
    "log_partition_function",
    "partition_function",
    "thermal_density",
    "unitary_from_hamiltonian",
    "validate_beta",
]

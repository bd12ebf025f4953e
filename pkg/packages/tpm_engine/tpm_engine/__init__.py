"""
TPM Engine Package
Two-point-measurement work statistics: joint and work distributions, moments,
the Jarzynski functional, Taylor resummation and the backward/Crooks protocol
"""

from .backward import (
    SUPPORT_FLOOR,
    backward_joint_distribution,
    backward_unitary,
    crooks_expected,
    crooks_ratio,
    crooks_table,
)
from .models import (
    MAX_MOMENT_ORDER,
    PROBABILITY_TOL,
    WORK_MERGE_TOL,
    BackwardMode,
    Evolution,
    Explicit,
    FinalGenerated,
    JointDistribution,
    ProtocolSpec,
    SuddenQuench,
    WorkDistribution,
    WorkValue,
    random_protocol,
)
from .protocol import (
    dissipated_work_average,
    exponential_work_average,
    free_energy_difference,
    jarzynski_average,
    joint_distribution,
    moment_closed_form,
    outcome_log_probabilities,
    outcome_works,
    taylor_partial_sum,
    work_distribution,
    work_moment,
    work_moments,
)

__all__ = [
    "SUPPORT_FLOOR",
    "backward_joint_distribution",
    "backward_unitary",
    "crooks_expected",
    "crooks_ratio",
    "crooks_table",
    "MAX_MOMENT_ORDER",
    "PROBABILITY_TOL",
    "WORK_MERGE_TOL",
    "BackwardMode",
    "Evolution",
    "Explicit",
    "FinalGenerated",
    "JointDistribution",
    "ProtocolSpec",
    "SuddenQuench",
    "WorkDistribution",
    "WorkValue",
    "random_protocol",
    "dissipated_work_average",
    "exponential_work_average",
    "free_energy_difference",
    "jarzynski_average",
    "joint_distribution",
    "moment_closed_form",
    "outcome_log_probabilities",
    "outcome_works",
    "taylor_partial_sum",
    "work_distribution",
    "work_moment",
    "work_moments",
]

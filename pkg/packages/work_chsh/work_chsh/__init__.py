"""
Work CHSH Package
Bell-like combinations of two-point-measurement work moments
"""

from .combinations import (
    ExpWorkBell,
    WeightedTerm,
    WorkOptimizationResult,
    classical_work_bounds,
    exp_work_bell_combination,
    moment_prefactor,
    optimal_work_settings,
    protocol_work_bell_combination,
    quantum_work_extrema,
    settings_optimizer,
    temperature_scan,
    three_setting_terms,
    three_setting_work,
    weighted_work_combination,
    work_bell_combination,
)
from .models import MomentCombination, WorkBellSettings

__all__ = [
    "ExpWorkBell",
    "MomentCombination",
    "WeightedTerm",
    "WorkBellSettings",
    "WorkOptimizationResult",
    "classical_work_bounds",
    "exp_work_bell_combination",
    "moment_prefactor",
    "optimal_work_settings",
    "protocol_work_bell_combination",
    "quantum_work_extrema",
    "settings_optimizer",
    "temperature_scan",
    "three_setting_terms",
    "three_setting_work",
    "weighted_work_combination",
    "work_bell_combination",
]

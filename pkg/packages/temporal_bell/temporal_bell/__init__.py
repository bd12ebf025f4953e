"""
Temporal Bell Package
Sequential two-time correlations, CHSH and three-setting temporal Bell values,
classical enumeration and Tsirelson-bound recovery
"""

from .correlations import (
    CLASSICAL_CHSH_BOUND,
    TSIRELSON_BOUND,
    VIOLATION_SLACK,
    CHSHSettings,
    ClassicalStrategy,
    ThreeSettingCheck,
    ThreeSettingResult,
    TwoTimeSetting,
    canonical_chsh_settings,
    chsh_closed_form,
    chsh_value,
    classical_chsh_bound,
    classical_chsh_range,
    classical_three_setting_check,
    enumerate_classical_strategies,
    sequential_probabilities,
    three_setting_bell,
    two_time_correlation,
)
from .optimizer import (
    AxisParametrization,
    OptimizationResult,
    TsirelsonResult,
    coordinate_ascent,
    maximize_angles,
    restart_rng,
    tsirelson_optimize,
)

__all__ = [
    "CLASSICAL_CHSH_BOUND",
    "TSIRELSON_BOUND",
    "VIOLATION_SLACK",
    "CHSHSettings",
    "ClassicalStrategy",
    "ThreeSettingCheck",
    "ThreeSettingResult",
    "TwoTimeSetting",
    "canonical_chsh_settings",
    "chsh_closed_form",
    "chsh_value",
    "classical_chsh_bound",
    "classical_chsh_range",
    "classical_three_setting_check",
    "enumerate_classical_strategies",
    "sequential_probabilities",
    "three_setting_bell",
    "two_time_correlation",
    "AxisParametrization",
    "OptimizationResult",
    "TsirelsonResult",
    "coordinate_ascent",
    "maximize_angles",
    "restart_rng",
    "tsirelson_optimize",
]

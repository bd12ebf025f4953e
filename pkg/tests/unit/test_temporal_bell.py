from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from packages.qubit_core.qubit_core import (
    MAXIMALLY_MIXED,
    X_AXIS,
    Z_AXIS,
    BlochVector,
    DensityOperator,
    bloch_from_angles,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.temporal_bell.temporal_bell import (
    CLASSICAL_CHSH_BOUND,
    TSIRELSON_BOUND,
    AxisParametrization,
    CHSHSettings,
    ClassicalStrategy,
    TwoTimeSetting,
    chsh_closed_form,
    chsh_value,
    classical_chsh_bound,
    classical_chsh_range,
    classical_three_setting_check,
    enumerate_classical_strategies,
    maximize_angles,
    restart_rng,
    sequential_probabilities,
    three_setting_bell,
    tsirelson_optimize,
    two_time_correlation,
)
from tests.unit.strategies import axes, states

REFERENCE_A = Z_AXIS
REFERENCE_B1 = bloch_from_angles(math.pi / 3, 0.0)
REFERENCE_B2 = bloch_from_angles(2 * math.pi / 3, 0.0)


class TestTwoTimeCorrelation:
    def test_parallel_and_antiparallel(self) -> None:
        assert two_time_correlation(TwoTimeSetting(Z_AXIS, Z_AXIS)) == pytest.approx(1.0, abs=1e-12)
        assert two_time_correlation(TwoTimeSetting(Z_AXIS, Z_AXIS.negated())) == pytest.approx(-1.0, abs=1e-12)
        assert two_time_correlation(TwoTimeSetting(Z_AXIS, X_AXIS)) == pytest.approx(0.0, abs=1e-12)

    def test_sequential_probabilities_for_mixed_state(self) -> None:
        q = sequential_probabilities(TwoTimeSetting(Z_AXIS, X_AXIS, MAXIMALLY_MIXED))
        assert_allclose(q, np.full((2, 2), 0.25), atol=1e-12)

    @settings(max_examples=300)
    @given(a=axes(), b=axes(), rho=states())
    def test_correlation_is_state_independent(self, a: BlochVector, b: BlochVector, rho: DensityOperator) -> None:
        setting = TwoTimeSetting(a, b, rho)
        q = sequential_probabilities(setting)
        assert abs(q.sum() - 1.0) <= 1e-12
        assert abs(two_time_correlation(setting) - a.dot(b)) <= 1e-12


class TestCHSH:
    def test_canonical_settings_reach_tsirelson(self, canonical: CHSHSettings) -> None:
        assert chsh_value(MAXIMALLY_MIXED, canonical) == pytest.approx(TSIRELSON_BOUND, abs=1e-12)
        assert chsh_closed_form(canonical) == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)

    @settings(max_examples=200)
    @given(a1=axes(), a2=axes(), b1=axes(), b2=axes(), rho=states())
    def test_operator_value_matches_closed_form_and_bound(
        self, a1: BlochVector, a2: BlochVector, b1: BlochVector, b2: BlochVector, rho: DensityOperator
    ) -> None:
        s = CHSHSettings(a1, a2, b1, b2)
        value = chsh_value(rho, s)
        assert abs(value - chsh_closed_form(s)) <= 1e-12
        assert abs(value) <= TSIRELSON_BOUND + 1e-12

    def test_with_final_negated_flips_sign(self, canonical: CHSHSettings) -> None:
        assert chsh_closed_form(canonical.with_final_negated()) == pytest.approx(-TSIRELSON_BOUND, abs=1e-12)


class TestClassicalStrategies:
    def test_enumeration(self) -> None:
        strategies = enumerate_classical_strategies()
        assert len(strategies) == 16
        assert sorted({s.value() for s in strategies}) == [-2, 2]

    def test_bound_and_range(self) -> None:
        bound, best = classical_chsh_bound()
        assert bound == CLASSICAL_CHSH_BOUND
        assert best.value() == 2
        assert classical_chsh_range() == (-2.0, 2.0)

    def test_rejects_non_sign_values(self) -> None:
        with pytest.raises(InvalidParameterError):
            ClassicalStrategy(1, 0, 1, 1)


class TestThreeSetting:
    def test_reference_axes_violate_minus_form(self) -> None:
        result = three_setting_bell(MAXIMALLY_MIXED, REFERENCE_A, REFERENCE_B1, REFERENCE_B2, "minus")
        assert result.lhs == pytest.approx(0.5, abs=1e-12)
        assert result.rhs == pytest.approx(1.0, abs=1e-12)
        assert result.violated

    def test_reference_axes_satisfy_plus_form(self) -> None:
        result = three_setting_bell(MAXIMALLY_MIXED, REFERENCE_A, REFERENCE_B1, REFERENCE_B2, "plus")
        assert result.lhs == pytest.approx(1.5, abs=1e-12)
        assert not result.violated

    def test_unknown_convention(self) -> None:
        with pytest.raises(InvalidParameterError):
            three_setting_bell(MAXIMALLY_MIXED, Z_AXIS, Z_AXIS, X_AXIS, "both")  # type: ignore[arg-type]

    @pytest.mark.parametrize("convention", ["plus", "minus"])
    def test_every_deterministic_assignment_holds(self, convention: str) -> None:
        rows = classical_three_setting_check(convention)  # type: ignore[arg-type]
        assert len(rows) == 8
        assert all(row.holds for row in rows)


class TestOptimizer:
    def test_restart_streams_are_reproducible_and_distinct(self) -> None:
        a = restart_rng(7, 3).uniform(size=4)
        assert_allclose(restart_rng(7, 3).uniform(size=4), a)
        assert not np.allclose(restart_rng(7, 4).uniform(size=4), a)

    def test_maximize_simple_objective(self) -> None:
        result = maximize_angles(lambda x: math.cos(x[0] - 1.0), 1, restarts=3, seed=1)
        assert result.value == pytest.approx(1.0, abs=1e-10)
        assert result.x[0] == pytest.approx(1.0, abs=1e-4)

    def test_rejects_bad_arguments(self) -> None:
        with pytest.raises(InvalidParameterError):
            maximize_angles(lambda x: 0.0, 2, restarts=0, seed=1)
        with pytest.raises(InvalidParameterError):
            maximize_angles(lambda x: 0.0, 2, restarts=1, seed=1, start=[0.0])

    def test_unconstrained_search_reaches_tsirelson(self) -> None:
        result = tsirelson_optimize(restarts=10, seed=7)
        assert result.value == pytest.approx(TSIRELSON_BOUND, abs=1e-6)
        assert result.value <= TSIRELSON_BOUND + 1e-12

    def test_tied_first_axes_reach_classical_value(self) -> None:
        result = tsirelson_optimize(restarts=5, seed=7, tie_first=True)
        assert result.value == pytest.approx(2.0, abs=1e-6)

    def test_canonical_start_is_kept(self, canonical: CHSHSettings) -> None:
        result = tsirelson_optimize(restarts=1, seed=0, start=canonical, coplanar=True)
        assert result.value == pytest.approx(TSIRELSON_BOUND, abs=1e-10)
        assert result.restart == 0

    def test_worker_count_does_not_change_result(self) -> None:
        serial = tsirelson_optimize(restarts=4, seed=3, coplanar=True)
        threaded = tsirelson_optimize(restarts=4, seed=3, coplanar=True, workers=3)
        assert serial.value == threaded.value
        assert serial.restart == threaded.restart

    def test_parametrization_dimensions(self) -> None:
        assert AxisParametrization().dim == 8
        assert AxisParametrization(coplanar=True).dim == 4
        assert AxisParametrization(coplanar=True, tie_first=True).dim == 3

    def test_coplanar_encode_rejects_out_of_plane_axes(self) -> None:
        s = CHSHSettings(bloch_from_angles(1.0, 1.0), Z_AXIS, Z_AXIS, Z_AXIS)
        with pytest.raises(InvalidParameterError):
            AxisParametrization(coplanar=True).encode(s)

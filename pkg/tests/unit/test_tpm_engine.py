from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from packages.qubit_core.qubit_core import (
    X_AXIS,
    Z_AXIS,
    BlochVector,
    TwoLevelHamiltonian,
    bloch_from_angles,
    random_unitary,
)
from packages.shared.shared.errors import DegenerateSupportError, InvalidParameterError
from packages.tpm_engine.tpm_engine import (
    BackwardMode,
    Explicit,
    FinalGenerated,
    JointDistribution,
    ProtocolSpec,
    backward_joint_distribution,
    crooks_expected,
    crooks_ratio,
    crooks_table,
    dissipated_work_average,
    exponential_work_average,
    free_energy_difference,
    jarzynski_average,
    joint_distribution,
    moment_closed_form,
    outcome_log_probabilities,
    outcome_works,
    random_protocol,
    taylor_partial_sum,
    work_distribution,
    work_moment,
    work_moments,
)
from tests.unit.strategies import axes, betas, energies, times


def quench(e_i: float = 1.0, e_f: float = 1.0, beta: float = 1.0,
           s_i: BlochVector = Z_AXIS, s_f: BlochVector = X_AXIS) -> ProtocolSpec:
    return ProtocolSpec(TwoLevelHamiltonian(e_i, s_i), TwoLevelHamiltonian(e_f, s_f), beta)


class TestJointDistribution:
    def test_perpendicular_quench_table(self) -> None:
        joint = joint_distribution(quench())
        assert_allclose(joint.table, [[0.0596015, 0.0596015], [0.4403985, 0.4403985]], atol=1e-7)

    def test_parallel_quench_is_diagonal(self) -> None:
        joint = joint_distribution(quench(s_f=Z_AXIS))
        assert joint.p(1, -1) == pytest.approx(0.0, abs=1e-15)
        assert joint.p(-1, 1) == pytest.approx(0.0, abs=1e-15)

    def test_first_marginal_is_initial_population(self) -> None:
        spec = quench(s_f=bloch_from_angles(0.4, 1.3))
        plus, minus = joint_distribution(spec).first_marginal()
        assert plus == pytest.approx(spec.initial_state.population(1), abs=1e-12)
        assert minus == pytest.approx(spec.initial_state.population(-1), abs=1e-12)

    @pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 10.0])
    def test_final_generated_evolution_leaves_table_unchanged(self, t: float) -> None:
        base = quench(1.0, 1.5, 0.8, bloch_from_angles(0.3, 1.0), bloch_from_angles(1.9, 2.5))
        moved = replace(base, evolution=FinalGenerated(t))
        assert_allclose(joint_distribution(moved).table, joint_distribution(base).table, atol=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_first_marginal_survives_explicit_unitaries(self, seed: int) -> None:
        spec = random_protocol(np.random.default_rng(seed))
        plus, minus = joint_distribution(spec).first_marginal()
        assert abs(plus - spec.initial_state.population(1)) <= 1e-12
        assert abs(minus - spec.initial_state.population(-1)) <= 1e-12

    def test_rejects_non_normalized_table(self) -> None:
        with pytest.raises(InvalidParameterError):
            JointDistribution(np.full((2, 2), 0.3))
        with pytest.raises(InvalidParameterError):
            JointDistribution(np.ones(4) / 4)

    def test_as_dict_labels(self) -> None:
        labels = list(joint_distribution(quench()).as_dict())
        assert labels == ["p(+,+)", "p(+,-)", "p(-,+)", "p(-,-)"]

    @settings(max_examples=150, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_random_protocols_are_normalized(self, seed: int) -> None:
        spec = random_protocol(np.random.default_rng(seed))
        table = joint_distribution(spec).table
        assert np.all(table >= 0.0)
        assert abs(table.sum() - 1.0) <= 1e-12


class TestWorkDistribution:
    def test_perpendicular_support(self) -> None:
        dist = work_distribution(quench())
        assert [v.w for v in dist] == [2.0, 0.0, -2.0]
        assert_allclose([v.prob for v in dist], [0.059601, 0.5, 0.440399], atol=1e-6)
        assert dist.total() == pytest.approx(1.0, abs=1e-12)

    def test_unequal_spectra_keep_four_points(self) -> None:
        dist = work_distribution(quench(e_f=2.0))
        assert [v.w for v in dist] == [3.0, 1.0, -1.0, -3.0]

    def test_prob_of(self) -> None:
        assert work_distribution(quench()).prob_of(0.0) == pytest.approx(0.5, abs=1e-12)

    def test_outcome_works_order(self) -> None:
        assert_allclose(outcome_works(quench(e_f=2.0)), [-1.0, 3.0, -3.0, 1.0])


class TestFreeEnergy:
    def test_unequal_spectra(self) -> None:
        assert free_energy_difference(quench(e_f=2.0)) == pytest.approx(-0.891220, abs=1e-6)

    def test_equal_spectra_and_infinite_temperature(self) -> None:
        assert free_energy_difference(quench()) == 0.0
        assert free_energy_difference(quench(e_f=2.0, beta=0.0)) == 0.0


class TestJarzynski:
    def test_reference_quench(self) -> None:
        assert jarzynski_average(quench()) == pytest.approx(1.0, abs=1e-12)

    def test_infinite_temperature(self) -> None:
        assert jarzynski_average(quench(beta=0.0)) == 1.0

    def test_exponential_work_average_is_partition_ratio(self) -> None:
        spec = quench(e_f=2.0, beta=0.7)
        expected = math.cosh(0.7 * 2.0) / math.cosh(0.7)
        assert exponential_work_average(spec) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(e_i=energies, e_f=energies, beta=betas, s_i=axes(), s_f=axes(), t=times)
    def test_identity_holds_for_final_generated_runs(
        self, e_i: float, e_f: float, beta: float, s_i: BlochVector, s_f: BlochVector, t: float
    ) -> None:
        spec = ProtocolSpec(
            TwoLevelHamiltonian(e_i, s_i), TwoLevelHamiltonian(e_f, s_f), beta, FinalGenerated(t)
        )
        assert abs(jarzynski_average(spec) - 1.0) <= 1e-10

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_identity_holds_for_explicit_unitaries(self, seed: int) -> None:
        spec = random_protocol(np.random.default_rng(seed))
        assert abs(jarzynski_average(spec) - 1.0) <= 1e-10
        assert dissipated_work_average(spec) >= -1e-10


class TestMoments:
    def test_reference_values(self) -> None:
        spec = quench()
        assert work_moment(spec, 0) == 1.0
        assert work_moment(spec, 1) == pytest.approx(-0.761594, abs=1e-6)
        assert work_moment(spec, 2) == pytest.approx(2.0, abs=1e-12)
        assert work_moment(spec, 3) == pytest.approx(-3.046376, abs=1e-6)

    def test_batch(self) -> None:
        got = work_moments(quench(), [1, 2])
        assert set(got) == {1, 2}
        assert got[2] == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("k", [-1, 61, 1.5, True])
    def test_rejects_bad_order(self, k: object) -> None:
        with pytest.raises(InvalidParameterError):
            work_moment(quench(), k)  # type: ignore[arg-type]

    def test_closed_form_rejects_bad_input(self) -> None:
        with pytest.raises(InvalidParameterError):
            moment_closed_form(1.0, 1.0, 1.5, 2)
        with pytest.raises(InvalidParameterError):
            moment_closed_form(1.0, 1.0, 0.0, 0)
        with pytest.raises(InvalidParameterError):
            moment_closed_form(-1.0, 1.0, 0.0, 1)

    @settings(max_examples=300, deadline=None)
    @given(e=energies, beta=betas, s_i=axes(), s_f=axes(), n=st.integers(min_value=1, max_value=10))
    def test_closed_form_matches_operator_evaluation(
        self, e: float, beta: float, s_i: BlochVector, s_f: BlochVector, n: int
    ) -> None:
        spec = quench(e, e, beta, s_i, s_f)
        numeric = work_moment(spec, n)
        closed = moment_closed_form(e, beta, s_i.dot(s_f), n)
        assert abs(numeric - closed) <= 1e-10 * max(1.0, abs(closed))

    def test_parallel_axes_do_no_work(self) -> None:
        assert moment_closed_form(1.0, 1.0, 1.0, 3) == 0.0


class TestTaylorResummation:
    def test_first_order(self) -> None:
        assert taylor_partial_sum(quench(), 1) == pytest.approx(0.238406, abs=1e-6)

    def test_zeroth_order(self) -> None:
        assert taylor_partial_sum(quench(), 0) == 1.0

    def test_converges_to_one(self) -> None:
        assert taylor_partial_sum(quench(beta=2.0), 40) == pytest.approx(1.0, abs=1e-10)

    def test_requires_equal_spectra(self) -> None:
        with pytest.raises(InvalidParameterError):
            taylor_partial_sum(quench(e_f=2.0), 5)


class TestBackwardAndCrooks:
    def test_reference_ratio(self) -> None:
        spec = quench()
        assert crooks_ratio(spec, 1, -1) == pytest.approx(math.exp(-2.0), rel=1e-9)
        assert crooks_expected(spec, 1, -1) == pytest.approx(0.135335, abs=1e-6)

    def test_degenerate_support_raises(self) -> None:
        spec = quench(s_f=Z_AXIS)
        with pytest.raises(DegenerateSupportError) as info:
            crooks_ratio(spec, 1, -1)
        assert (info.value.n, info.value.m) == (1, -1)

    def test_table_marks_degenerate_pairs(self) -> None:
        rows = crooks_table(quench(s_f=Z_AXIS))
        assert [(r["n"], r["m"]) for r in rows] == [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        assert rows[1]["ratio"] is None
        assert rows[0]["ratio"] == pytest.approx(rows[0]["expected"], rel=1e-9)

    def test_backward_table_for_identical_axes(self) -> None:
        table = backward_joint_distribution(quench(s_f=Z_AXIS)).table
        assert_allclose(table, [[0.119203, 0.0], [0.0, 0.880797]], atol=1e-6)

    def test_backward_table_at_infinite_temperature(self) -> None:
        assert_allclose(backward_joint_distribution(quench(beta=0.0)).table, np.full((2, 2), 0.25), atol=1e-14)

    def test_symmetric_protocol_runs_the_same_both_ways(self) -> None:
        axis = bloch_from_angles(1.2, 0.4)
        spec = quench(1.3, 1.3, 0.7, axis, axis)
        assert_allclose(backward_joint_distribution(spec).table, joint_distribution(spec).table, atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_ratio_within_relative_bound(self, seed: int) -> None:
        spec = random_protocol(np.random.default_rng(seed))
        for row in crooks_table(spec):
            if row["ratio"] is None or row["p_backward"] <= 1e-12:  # type: ignore[operator]
                continue
            assert abs(row["ratio"] / row["expected"] - 1.0) <= 1e-10  # type: ignore[operator]

    def test_backward_table_is_normalized(self) -> None:
        spec = quench(e_f=2.0, s_f=bloch_from_angles(1.0, 0.5))
        assert backward_joint_distribution(spec).table.sum() == pytest.approx(1.0, abs=1e-12)

    def test_initial_ht_mode_matches_exact_for_equal_hamiltonians(self) -> None:
        h = TwoLevelHamiltonian(1.0, bloch_from_angles(0.8, 0.2))
        spec = ProtocolSpec(h, h, 0.9, FinalGenerated(1.7))
        exact = backward_joint_distribution(spec, BackwardMode.EXACT_INVERSE).table
        reversed_initial = backward_joint_distribution(spec, BackwardMode.INITIAL_HT).table
        assert_allclose(reversed_initial, exact, atol=1e-12)

    def test_initial_ht_mode_breaks_the_ratio_for_distinct_hamiltonians(self) -> None:
        spec = ProtocolSpec(
            TwoLevelHamiltonian(1.0, Z_AXIS),
            TwoLevelHamiltonian(1.5, bloch_from_angles(1.1, 0.0)),
            1.0,
            FinalGenerated(0.9),
        )
        rows = crooks_table(spec, BackwardMode.INITIAL_HT)
        deviations = [
            abs(r["ratio"] / r["expected"] - 1.0) for r in rows if r["ratio"] is not None
        ]
        assert max(deviations) > 1e-6

    @settings(max_examples=200, deadline=None)
    @given(e_i=energies, e_f=energies, beta=betas, s_i=axes(), s_f=axes(),
           seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_exact_inverse_satisfies_the_ratio(
        self, e_i: float, e_f: float, beta: float, s_i: BlochVector, s_f: BlochVector, seed: int
    ) -> None:
        u = random_unitary(np.random.default_rng(seed))
        spec = ProtocolSpec(TwoLevelHamiltonian(e_i, s_i), TwoLevelHamiltonian(e_f, s_f), beta, Explicit(u))
        forward = joint_distribution(spec)
        backward = backward_joint_distribution(spec)
        for n in (1, -1):
            for m in (1, -1):
                # p_F(n,m) = e^{-β(W+ΔF)} p_B(m,n), checked multiplicatively to stay defined on zeros
                lhs = forward.p(n, m)
                rhs = crooks_expected(spec, n, m) * backward.p(m, n)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


class TestLowTemperature:
    """β·E far past the double range of e^{βE}; populations of the excited level underflow."""

    def test_jarzynski_stays_exact(self) -> None:
        spec = quench(2.0, 2.0, beta=200.0)
        assert jarzynski_average(spec) == pytest.approx(1.0, abs=1e-12)
        assert exponential_work_average(spec) == pytest.approx(1.0, abs=1e-12)

    def test_jarzynski_stays_exact_for_unequal_spectra(self) -> None:
        spec = quench(2.0, 1.5, beta=200.0)
        assert free_energy_difference(spec) == pytest.approx(0.5, abs=1e-12)
        assert jarzynski_average(spec) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_average_saturates_to_inf(self) -> None:
        assert exponential_work_average(quench(0.01, 4.0, beta=200.0)) == math.inf

    def test_log_probabilities_keep_the_underflowed_tail(self) -> None:
        logs = outcome_log_probabilities(quench(2.0, 2.0, beta=200.0))
        assert joint_distribution(quench(2.0, 2.0, beta=200.0)).p(1, -1) == 0.0
        assert logs[1] == pytest.approx(-800.0 + math.log(0.5), abs=1e-9)
        assert logs[3] == pytest.approx(math.log(0.5), abs=1e-12)

    def test_crooks_table_reports_inf_instead_of_overflowing(self) -> None:
        rows = crooks_table(quench(2.0, 2.0, beta=200.0))
        by_pair = {(r["n"], r["m"]): r for r in rows}
        assert by_pair[(-1, 1)]["expected"] == math.inf
        assert by_pair[(-1, 1)]["ratio"] is None
        assert by_pair[(-1, -1)]["ratio"] == pytest.approx(1.0, rel=1e-12)

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from pydantic import ValidationError

from packages.qubit_core.qubit_core import X_AXIS, Z_AXIS, TwoLevelHamiltonian
from packages.sampler.sampler import (
    RunningMoments,
    SamplerConfig,
    TrajectoryBatch,
    chunk_rng,
    estimate_free_energy,
    estimate_jarzynski,
    estimate_moments,
    outcome_cdf,
    outcome_frequencies,
    sample_trajectories,
)
from packages.shared.shared.errors import InvalidParameterError
from packages.tpm_engine.tpm_engine import ProtocolSpec, free_energy_difference, joint_distribution, work_moment

SIGMAS = 5.0


def reference_spec(e_f: float = 1.0, beta: float = 1.0) -> ProtocolSpec:
    return ProtocolSpec(TwoLevelHamiltonian(1.0, Z_AXIS), TwoLevelHamiltonian(e_f, X_AXIS), beta)


class TestSamplerConfig:
    def test_chunking(self) -> None:
        cfg = SamplerConfig(seed=1, samples=10, chunk_size=3)
        assert cfg.chunk_count == 4
        assert [cfg.chunk_length(j) for j in range(4)] == [3, 3, 3, 1]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"seed": -1, "samples": 10},
            {"seed": 2**64, "samples": 10},
            {"seed": 1, "samples": 0},
            {"seed": 1, "samples": 10, "workers": 0},
            {"seed": 1, "samples": 10, "chunk_size": 0},
        ],
    )
    def test_rejects_invalid_values(self, kwargs: dict) -> None:
        with pytest.raises(ValidationError):
            SamplerConfig(**kwargs)


class TestSampling:
    def test_cdf_ends_at_one(self) -> None:
        cdf = outcome_cdf(reference_spec())
        assert cdf[-1] == 1.0
        assert np.all(np.diff(cdf) >= 0.0)

    def test_chunk_streams_differ(self) -> None:
        assert not np.array_equal(chunk_rng(5, 0).random(8), chunk_rng(5, 1).random(8))

    def test_same_seed_same_batch(self) -> None:
        cfg = SamplerConfig(seed=42, samples=5000, chunk_size=700)
        first = sample_trajectories(reference_spec(), cfg)
        second = sample_trajectories(reference_spec(), cfg)
        assert_array_equal(first.outcome, second.outcome)

    @settings(max_examples=20, deadline=None)
    @given(workers=st.integers(min_value=2, max_value=6), seed=st.integers(min_value=0, max_value=2**32))
    def test_worker_count_does_not_change_batch(self, workers: int, seed: int) -> None:
        serial = SamplerConfig(seed=seed, samples=4000, chunk_size=512)
        threaded = serial.model_copy(update={"workers": workers})
        spec = reference_spec()
        assert_array_equal(sample_trajectories(spec, serial).w, sample_trajectories(spec, threaded).w)

    def test_rows_carry_consistent_work(self) -> None:
        spec = reference_spec(e_f=2.0)
        batch = sample_trajectories(spec, SamplerConfig(seed=3, samples=50))
        assert len(batch) == 50
        for sample in batch:
            assert sample.w == spec.work(sample.n, sample.m)
        assert batch[0].w == float(batch.w[0])

    def test_impossible_outcomes_never_drawn(self) -> None:
        parallel = ProtocolSpec(TwoLevelHamiltonian(1.0, Z_AXIS), TwoLevelHamiltonian(1.0, Z_AXIS), 1.0)
        freq = outcome_frequencies(sample_trajectories(parallel, SamplerConfig(seed=9, samples=20000)))
        assert freq[0, 1] == 0.0
        assert freq[1, 0] == 0.0

    def test_frequencies_track_joint_distribution(self) -> None:
        spec = reference_spec()
        n = 200_000
        freq = outcome_frequencies(sample_trajectories(spec, SamplerConfig(seed=11, samples=n)))
        table = joint_distribution(spec).table
        sigma = np.sqrt(table * (1.0 - table) / n)
        assert np.all(np.abs(freq - table) <= SIGMAS * sigma + 1e-12)

    def test_empty_batch_has_no_frequencies(self) -> None:
        empty = np.empty(0, dtype=np.intp)
        batch = TrajectoryBatch(outcome=empty, n=empty, m=empty, w=empty.astype(float))
        with pytest.raises(InvalidParameterError):
            outcome_frequencies(batch)


class TestRunningMoments:
    @settings(max_examples=100)
    @given(
        values=st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=2, max_size=60),
        cut=st.integers(min_value=1, max_value=59),
    )
    def test_merge_equals_single_pass(self, values: list, cut: int) -> None:
        arr = np.array(values)
        cut = min(cut, arr.size - 1)
        merged = RunningMoments.of(arr[:cut]).merge(RunningMoments.of(arr[cut:]))
        whole = RunningMoments.of(arr)
        assert merged.count == whole.count
        assert_allclose(merged.mean, whole.mean, rtol=1e-10, atol=1e-10)
        assert_allclose(merged.m2, whole.m2, rtol=1e-8, atol=1e-8)

    def test_std_error_uses_unbiased_variance(self) -> None:
        acc = RunningMoments.of(np.array([1.0, 2.0, 3.0, 4.0]))
        assert acc.std_error() == pytest.approx(math.sqrt(np.var([1, 2, 3, 4], ddof=1) / 4), rel=1e-12)

    def test_single_value_has_zero_error(self) -> None:
        assert RunningMoments.of(np.array([2.5])).std_error() == 0.0


class TestEstimators:
    def test_jarzynski_within_standard_errors(self) -> None:
        report = estimate_jarzynski(reference_spec(), SamplerConfig(seed=20240601, samples=100_000))
        assert report.estimator == "jarzynski"
        assert report.samples == 100_000
        assert report.std_error > 0.0
        assert abs(report.mean - 1.0) <= SIGMAS * report.std_error

    def test_estimates_are_identical_across_worker_counts(self) -> None:
        spec = reference_spec(e_f=1.5)
        serial = SamplerConfig(seed=77, samples=20_000, chunk_size=3000)
        threaded = serial.model_copy(update={"workers": 3})
        assert estimate_jarzynski(spec, serial) == estimate_jarzynski(spec, threaded)
        assert estimate_moments(spec, serial, [1, 2]) == estimate_moments(spec, threaded, [1, 2])

    def test_standard_error_shrinks_with_root_n(self) -> None:
        spec = reference_spec(e_f=1.5)
        coarse = estimate_jarzynski(spec, SamplerConfig(seed=31, samples=10_000))
        fine = estimate_jarzynski(spec, SamplerConfig(seed=32, samples=1_000_000))
        assert 5.0 <= coarse.std_error / fine.std_error <= 20.0
        (coarse_m,) = estimate_moments(spec, SamplerConfig(seed=31, samples=10_000), [1])
        (fine_m,) = estimate_moments(spec, SamplerConfig(seed=32, samples=1_000_000), [1])
        assert 5.0 <= coarse_m.std_error / fine_m.std_error <= 20.0

    def test_single_sample_flag(self) -> None:
        report = estimate_jarzynski(reference_spec(), SamplerConfig(seed=1, samples=1))
        assert report.single_sample
        assert report.std_error == 0.0

    def test_moments_within_standard_errors(self) -> None:
        spec = reference_spec()
        reports = estimate_moments(spec, SamplerConfig(seed=5, samples=100_000), [0, 1, 2, 3])
        assert [r.estimator for r in reports] == ["moment_0", "moment_1", "moment_2", "moment_3"]
        assert reports[0].mean == 1.0
        assert reports[0].std_error == 0.0
        for k, report in zip([1, 2, 3], reports[1:]):
            assert abs(report.mean - work_moment(spec, k)) <= SIGMAS * report.std_error

    def test_moment_orders_are_validated(self) -> None:
        assert estimate_moments(reference_spec(), SamplerConfig(seed=1, samples=10), []) == []
        with pytest.raises(InvalidParameterError):
            estimate_moments(reference_spec(), SamplerConfig(seed=1, samples=10), [61])

    def test_free_energy_estimate(self) -> None:
        report = estimate_free_energy(reference_spec(e_f=2.0), SamplerConfig(seed=13, samples=200_000))
        assert abs(report.mean - (-0.891220)) <= SIGMAS * report.std_error + 1e-6

    def test_free_energy_needs_finite_temperature(self) -> None:
        with pytest.raises(InvalidParameterError):
            estimate_free_energy(reference_spec(beta=0.0), SamplerConfig(seed=1, samples=10))


class TestLowTemperatureEstimators:
    """e^{βW} past double range on outcomes that are still drawn."""

    @staticmethod
    def cold_spec() -> ProtocolSpec:
        return ProtocolSpec(TwoLevelHamiltonian(0.01, Z_AXIS), TwoLevelHamiltonian(4.0, X_AXIS), 200.0)

    def test_free_energy_estimate_is_finite_and_unbiased(self) -> None:
        spec = self.cold_spec()
        report = estimate_free_energy(spec, SamplerConfig(seed=21, samples=200_000))
        assert math.isfinite(report.mean) and math.isfinite(report.std_error)
        assert abs(report.mean - free_energy_difference(spec)) <= SIGMAS * report.std_error + 1e-6

    def test_jarzynski_estimate_is_finite(self) -> None:
        report = estimate_jarzynski(self.cold_spec(), SamplerConfig(seed=22, samples=200_000))
        assert math.isfinite(report.mean) and math.isfinite(report.std_error)
        assert abs(report.mean - 1.0) <= SIGMAS * report.std_error

    def test_underflowed_outcomes_keep_a_finite_estimate(self) -> None:
        spec = ProtocolSpec(TwoLevelHamiltonian(2.0, Z_AXIS), TwoLevelHamiltonian(2.0, X_AXIS), 200.0)
        report = estimate_jarzynski(spec, SamplerConfig(seed=23, samples=10_000, chunk_size=999))
        assert 0.0 < report.mean < 1.0
        assert math.isfinite(report.std_error)

    def test_shifted_estimates_stay_worker_invariant(self) -> None:
        serial = SamplerConfig(seed=24, samples=30_000, chunk_size=4000)
        threaded = serial.model_copy(update={"workers": 4})
        assert estimate_free_energy(self.cold_spec(), serial) == estimate_free_energy(self.cold_spec(), threaded)

"""
Sampler Package
Seeded, chunk-parallel Monte Carlo over two-point-measurement trajectories
"""

from .models import (
    DEFAULT_CHUNK_SIZE,
    EstimateReport,
    SamplerConfig,
    TrajectoryBatch,
    TrajectorySample,
)
from .montecarlo import (
    RunningMoments,
    chunk_rng,
    estimate_free_energy,
    estimate_jarzynski,
    estimate_moments,
    outcome_cdf,
    outcome_frequencies,
    sample_trajectories,
)

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "EstimateReport",
    "SamplerConfig",
    "TrajectoryBatch",
    "TrajectorySample",
    "RunningMoments",
    "chunk_rng",
    "estimate_free_energy",
    "estimate_jarzynski",
    "estimate_moments",
    "outcome_cdf",
    "outcome_frequencies",
    "sample_trajectories",
]

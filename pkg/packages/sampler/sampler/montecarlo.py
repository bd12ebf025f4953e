# packages/sampler/sampler/montecarlo.py
"""
Seeded Monte Carlo over two-point-measurement trajectories.

The N draws are cut into chunks of cfg.chunk_size. Chunk j owns the Philox
stream SeedSequence(seed, spawn_key=(j,)) and maps uniforms to outcome pairs by
inverse CDF over OUTCOME_ORDER. Workers pick up chunks round-robin; per-chunk
(count, mean, M2) summaries are merged in ascending chunk order, so a batch or
an estimate is bit-identical for every worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from packages.qubit_core.qubit_core import exp_or_inf
from packages.shared.shared.errors import InvalidParameterError
from packages.shared.shared.logging import get_logger
from packages.shared.shared.types import OUTCOME_ORDER
from packages.tpm_engine.tpm_engine import (
    MAX_MOMENT_ORDER,
    ProtocolSpec,
    free_energy_difference,
    joint_distribution,
    outcome_works,
)
from .models import EstimateReport, SamplerConfig, TrajectoryBatch

logger = get_logger("sampler")

_N_OF = np.array([n for n, _ in OUTCOME_ORDER], dtype=np.int8)
_M_OF = np.array([m for _, m in OUTCOME_ORDER], dtype=np.int8)

Transform = Callable[[np.ndarray], np.ndarray]


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(chunk),))))


def outcome_cdf(spec: ProtocolSpec) -> np.ndarray:
    probs = np.array([p for _, p in joint_distribution(spec).items()], dtype=float)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return cdf


def _draw_outcomes(cdf: np.ndarray, cfg: SamplerConfig, chunk: int) -> np.ndarray:
    u = chunk_rng(cfg.seed, chunk).random(cfg.chunk_length(chunk))
    idx = np.searchsorted(cdf, u, side="right")
    return np.clip(idx, 0, len(OUTCOME_ORDER) - 1)


def _map_chunks(cfg: SamplerConfig, job: Callable[[int], object]) -> List[object]:
    """Run job over every chunk index; results come back in chunk order."""
    chunks = range(cfg.chunk_count)
    if cfg.workers > 1 and cfg.chunk_count > 1:
        with ThreadPoolExecutor(max_workers=min(cfg.workers, cfg.chunk_count)) as pool:
            return list(pool.map(job, chunks))
    return [job(j) for j in chunks]


def sample_trajectories(spec: ProtocolSpec, cfg: SamplerConfig) -> TrajectoryBatch:
    cdf = outcome_cdf(spec)
    works = outcome_works(spec)
    parts = _map_chunks(cfg, lambda j: _draw_outcomes(cdf, cfg, j))
    outcome = np.concatenate(parts) if parts else np.empty(0, dtype=np.intp)
    logger.debug("sampled %d trajectories in %d chunks (seed=%d)", outcome.size, cfg.chunk_count, cfg.seed)
    return TrajectoryBatch(outcome=outcome, n=_N_OF[outcome], m=_M_OF[outcome], w=works[outcome])


def outcome_frequencies(batch: TrajectoryBatch) -> np.ndarray:
    """Empirical 2x2 table; rows are n = +, -, columns m = +, -."""
    if len(batch) == 0:
        raise InvalidParameterError("batch", "cannot take frequencies of an empty batch")
    counts = np.bincount(batch.outcome, minlength=len(OUTCOME_ORDER)).astype(float)
    return (counts / len(batch)).reshape(2, 2)


# ---------- streaming moments ----------

@dataclass(frozen=True)
class RunningMoments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> "RunningMoments":
        mean = float(np.mean(values))
        return cls(count=int(values.size), mean=mean, m2=float(np.sum((values - mean) ** 2)))

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return RunningMoments(count=count, mean=mean, m2=m2)

    def scaled(self, factor: float) -> "RunningMoments":
        return RunningMoments(count=self.count, mean=self.mean * factor, m2=self.m2 * factor * factor)

    def std_error(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(max(self.m2, 0.0) / (self.count - 1) / self.count)


def _summaries(spec: ProtocolSpec, cfg: SamplerConfig, transforms: Sequence[Transform]) -> List[RunningMoments]:
    cdf = outcome_cdf(spec)
    works = outcome_works(spec)

    def job(chunk: int) -> Tuple[RunningMoments, ...]:
        w = works[_draw_outcomes(cdf, cfg, chunk)]
        return tuple(RunningMoments.of(f(w)) for f in transforms)

    per_chunk = _map_chunks(cfg, job)
    merged = list(per_chunk[0])
    for part in per_chunk[1:]:
        merged = [acc.merge(nxt) for acc, nxt in zip(merged, part)]
    return merged


def _report(name: str, acc: RunningMoments) -> EstimateReport:
    return EstimateReport(
        estimator=name,
        mean=acc.mean,
        std_error=acc.std_error(),
        samples=acc.count,
        single_sample=acc.count == 1,
    )


def _exp_summary(spec: ProtocolSpec, cfg: SamplerConfig, shift: float) -> Tuple[RunningMoments, float]:
    """
    Moments of e^{x - c} for x = β(w + shift), with c the largest sampled x.

    Each chunk scales by its own maximum so every value lies in (0, 1]; the
    chunk summaries are brought to the common c before the ordered merge.
    """
    cdf = outcome_cdf(spec)
    works = outcome_works(spec)
    beta = spec.beta

    def job(chunk: int) -> Tuple[RunningMoments, float]:
        x = beta * (works[_draw_outcomes(cdf, cfg, chunk)] + shift)
        top = float(np.max(x))
        return RunningMoments.of(np.exp(x - top)), top

    per_chunk = _map_chunks(cfg, job)
    c = max(top for _, top in per_chunk)
    scaled = [part.scaled(math.exp(top - c)) for part, top in per_chunk]
    acc = scaled[0]
    for part in scaled[1:]:
        acc = acc.merge(part)
    return acc, c


def _rescale(value: float, c: float) -> float:
    """value·e^{c} without forming e^{c}."""
    if value <= 0.0:
        return 0.0
    return exp_or_inf(c + math.log(value))


def estimate_jarzynski(spec: ProtocolSpec, cfg: SamplerConfig) -> EstimateReport:
    """Sample mean of e^{β(w + ΔF)}; the exact value is 1."""
    acc, c = _exp_summary(spec, cfg, free_energy_difference(spec))
    report = EstimateReport(
        estimator="jarzynski",
        mean=_rescale(acc.mean, c),
        std_error=_rescale(acc.std_error(), c),
        samples=acc.count,
        single_sample=acc.count == 1,
    )
    logger.info("jarzynski estimate %.9g +/- %.3g (N=%d)", report.mean, report.std_error, report.samples)
    return report


def estimate_moments(spec: ProtocolSpec, cfg: SamplerConfig, orders: Sequence[int]) -> List[EstimateReport]:
    checked: List[int] = []
    for k in orders:
        if isinstance(k, bool) or int(k) != k or not 0 <= int(k) <= MAX_MOMENT_ORDER:
            raise InvalidParameterError(
                "orders", f"each order must be an integer in [0, {MAX_MOMENT_ORDER}], got {k!r}"
            )
        checked.append(int(k))
    if not checked:
        return []
    transforms: List[Transform] = [lambda w, k=k: w**k for k in checked]
    accs = _summaries(spec, cfg, transforms)
    return [_report(f"moment_{k}", acc) for k, acc in zip(checked, accs)]


def estimate_free_energy(spec: ProtocolSpec, cfg: SamplerConfig) -> EstimateReport:
    """ΔF = -(1/β) ln⟨e^{βW}⟩ with a delta-method standard error."""
    if spec.beta == 0.0:
        raise InvalidParameterError("beta", "free energy estimate needs beta > 0")
    beta = spec.beta
    acc, c = _exp_summary(spec, cfg, 0.0)
    # the e^{c} scale cancels in the delta-method ratio
    return EstimateReport(
        estimator="free_energy",
        mean=-(c + math.log(acc.mean)) / beta,
        std_error=acc.std_error() / (beta * acc.mean),
        samples=acc.count,
        single_sample=acc.count == 1,
    )

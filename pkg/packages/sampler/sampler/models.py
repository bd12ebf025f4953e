# packages/sampler/sampler/models.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from packages.shared.shared.types import Sign

DEFAULT_CHUNK_SIZE = 65536
MAX_SEED = 2**64 - 1


class SamplerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, le=MAX_SEED)
    samples: int = Field(ge=1)
    workers: int = Field(default=1, ge=1)
    # the random stream is keyed by chunk index, not by worker
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)

    @property
    def chunk_count(self) -> int:
        return -(-self.samples // self.chunk_size)

    def chunk_length(self, index: int) -> int:
        start = index * self.chunk_size
        return min(self.chunk_size, self.samples - start)


@dataclass(frozen=True)
class TrajectorySample:
    n: Sign
    m: Sign
    w: float


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Column storage for sampled trajectories; outcome[k] indexes OUTCOME_ORDER."""

    outcome: np.ndarray
    n: np.ndarray
    m: np.ndarray
    w: np.ndarray

    def __len__(self) -> int:
        return int(self.w.size)

    def __iter__(self) -> Iterator[TrajectorySample]:
        for n, m, w in zip(self.n.tolist(), self.m.tolist(), self.w.tolist()):
            yield TrajectorySample(n=n, m=m, w=w)

    def __getitem__(self, k: int) -> TrajectorySample:
        return TrajectorySample(n=int(self.n[k]), m=int(self.m[k]), w=float(self.w[k]))  # type: ignore[arg-type]


class EstimateReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimator: str
    mean: float
    std_error: float = Field(ge=0.0)
    samples: int = Field(ge=1)
    # N = 1 has no sample variance; std_error is then reported as 0
    single_sample: bool = False

from __future__ import annotations

import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from packages.shared.shared.errors import InvalidParameterError

Command = Literal[
    "jarzynski",
    "moments",
    "work-dist",
    "chsh",
    "bell3",
    "work-bell",
    "classical-bounds",
    "optimize",
    "crooks",
    "sample",
    "scan",
    "selftest",
]
ScanParam = Literal["beta", "energy", "time", "angle-theta-f"]
ScanQuantity = Literal["jarzynski", "moment", "taylor", "work-bell", "free-energy"]
Components = Tuple[float, float, float]
Number = Optional[Union[int, float]]

SCAN_PARAMS: Tuple[str, ...] = ("beta", "energy", "time", "angle-theta-f")


class ScanDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    param: ScanParam
    start: float = Field(allow_inf_nan=False)
    stop: float = Field(allow_inf_nan=False)
    steps: int = Field(ge=2)

    @classmethod
    def parse(cls, text: str) -> "ScanDescriptor":
        """'beta=0:3:31' -> ScanDescriptor(param='beta', start=0, stop=3, steps=31)."""
        name, sep, grid = text.partition("=")
        name = name.strip()
        if not sep:
            raise InvalidParameterError("scan", f"expected param=start:stop:steps, got {text!r}")
        if name not in SCAN_PARAMS:
            raise InvalidParameterError("scan", f"cannot scan '{name}'; choose one of {', '.join(SCAN_PARAMS)}")
        parts = grid.split(":")
        if len(parts) != 3:
            raise InvalidParameterError("scan", f"expected start:stop:steps, got {grid!r}")
        try:
            start, stop = float(parts[0]), float(parts[1])
            steps = int(parts[2])
        except ValueError as exc:
            raise InvalidParameterError("scan", f"malformed grid {grid!r}") from exc
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise InvalidParameterError("scan", "grid bounds must be finite")
        if steps < 2:
            raise InvalidParameterError("scan", f"steps must be >= 2, got {steps}")
        return cls(param=name, start=start, stop=stop, steps=steps)  # type: ignore[arg-type]

    def grid(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


class RunRequest(BaseModel):
    """Parsed and validated parameters of one CLI invocation; axes are stored as unit components."""

    model_config = ConfigDict(frozen=True)

    command: Command
    energy: float = Field(default=1.0, gt=0.0, allow_inf_nan=False)
    energy_final: Optional[float] = Field(default=None, gt=0.0, allow_inf_nan=False)
    beta: float = Field(default=1.0, ge=0.0, allow_inf_nan=False)
    axis_i: Optional[Components] = None
    axis_f: Optional[Components] = None
    axis_a1: Optional[Components] = None
    axis_a2: Optional[Components] = None
    axis_b1: Optional[Components] = None
    axis_b2: Optional[Components] = None
    time: float = Field(default=0.0, allow_inf_nan=False)
    evolution: Literal["quench", "final-ht", "explicit"] = "quench"
    unitary: Optional[Tuple[float, float, float]] = None
    backward_mode: Literal["exact", "initial-ht"] = "exact"
    order: Optional[int] = Field(default=None, ge=0, le=60)
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, le=2**64 - 1)
    workers: Optional[int] = Field(default=None, ge=1)
    restarts: Optional[int] = Field(default=None, ge=1)
    target: Literal["chsh", "work-bell"] = "chsh"
    outcome_n: Optional[Literal[1, -1]] = None
    outcome_m: Optional[Literal[1, -1]] = None
    scan: Optional[ScanDescriptor] = None
    quantity: ScanQuantity = "jarzynski"
    convention: Literal["plus", "minus"] = "minus"
    format: Literal["json", "csv"] = "json"
    optimal: bool = False
    check: bool = False
    tolerance: float = Field(default=1e-10, gt=0.0, allow_inf_nan=False)
    suites: Optional[Tuple[str, ...]] = None

    @model_validator(mode="after")
    def _consistent(self) -> "RunRequest":
        if self.command == "scan" and self.scan is None:
            raise ValueError("scan requires --scan param=start:stop:steps")
        if (self.outcome_n is None) != (self.outcome_m is None):
            raise ValueError("--outcome-n and --outcome-m must be given together")
        return self

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


class ResultTable(BaseModel):
    columns: List[str]
    rows: List[List[Number]]

    @model_validator(mode="after")
    def _rectangular(self) -> "ResultTable":
        width = len(self.columns)
        for k, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {k} has {len(row)} cells, expected {width}")
        return self


class ResultDocument(BaseModel):
    request: Dict[str, Any]
    results: Dict[str, Number] = Field(default_factory=dict)
    table: Optional[ResultTable] = None
    notes: List[str] = Field(default_factory=list)

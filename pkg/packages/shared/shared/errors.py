# packages/shared/shared/errors.py

from __future__ import annotations

from typing import Optional, Sequence


class QThermoError(Exception):
    """Base error for the qthermo-lab packages."""


class InvalidParameterError(QThermoError, ValueError):
    def __init__(self, name: str, reason: str) -> None:
        super().__init__(f"Invalid parameter '{name}': {reason}")
        self.name = name
        self.reason = reason


class InvalidBlochVectorError(InvalidParameterError):
    def __init__(self, components: Sequence[float], norm: float) -> None:
        super().__init__(
            "bloch_vector",
            f"components {tuple(components)} have norm {norm:.12g}, expected 1",
        )
        self.components = tuple(components)
        self.norm = norm


class DegenerateSupportError(QThermoError):
    def __init__(self, n: int, m: int, probability: float) -> None:
        super().__init__(
            f"Outcome pair (n={n:+d}, m={m:+d}) has backward probability {probability:.3e}; "
            "ratio is undefined on degenerate support"
        )
        self.n = n
        self.m = m
        self.probability = probability


class ValidationFailure(QThermoError):
    def __init__(
        self,
        check: str,
        observed: float,
        tolerance: float,
        *,
        detail: Optional[str] = None,
    ) -> None:
        message = f"Check '{check}' failed: deviation {observed:.3e} exceeds tolerance {tolerance:.1e}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.check = check
        self.observed = observed
        self.tolerance = tolerance
        self.detail = detail

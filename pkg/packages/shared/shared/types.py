# packages/shared/shared/types.py
from __future__ import annotations

from typing import Literal, Tuple

from typing_extensions import TypeAlias

Sign: TypeAlias = Literal[1, -1]
OutcomePair: TypeAlias = Tuple[Sign, Sign]

# Fixed enumeration order for (n, m) outcome tables and inverse-CDF sampling.
OUTCOME_ORDER: Tuple[OutcomePair, ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))
SIGNS: Tuple[Sign, Sign] = (1, -1)

Convention: TypeAlias = Literal["plus", "minus"]


def sign_label(sign: int) -> str:
    return "+" if sign > 0 else "-"


def parse_sign(value: str | int) -> Sign:
    if isinstance(value, int):
        if value in (1, -1):
            return value  # type: ignore[return-value]
        raise ValueError(f"sign must be +1 or -1, got {value}")
    text = value.strip()
    if text in {"+", "+1", "1", "plus"}:
        return 1
    if text in {"-", "-1", "minus"}:
        return -1
    raise ValueError(f"sign must be '+' or '-', got {value!r}")

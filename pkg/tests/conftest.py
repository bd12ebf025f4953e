from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
LAB_SRC = PROJECT_ROOT / "apps" / "lab" / "src"
PACKAGES_DIR = PROJECT_ROOT / "packages"


def _ensure_sys_path(path: Path) -> None:
    as_str = str(path)
    if as_str not in sys.path:
        sys.path.insert(0, as_str)


for candidate in (PROJECT_ROOT, LAB_SRC, PACKAGES_DIR):
    _ensure_sys_path(candidate)

from packages.temporal_bell.temporal_bell import CHSHSettings, canonical_chsh_settings  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(20240601)))


@pytest.fixture(scope="session")
def canonical() -> CHSHSettings:
    return canonical_chsh_settings()

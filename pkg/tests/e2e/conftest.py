from __future__ import annotations

from typing import Iterator, Sequence

import pytest

from cli.run_lab import run  # type: ignore  # pylint: disable=wrong-import-position
from config.settings import get_settings
from tests.e2e.helpers import LabRun, LabRunner


@pytest.fixture(autouse=True)
def fresh_settings() -> Iterator[None]:
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def lab(capsys: pytest.CaptureFixture[str]) -> LabRunner:
    """Run the CLI in-process and capture both streams."""

    def invoke(argv: Sequence[str]) -> LabRun:
        code = run(list(argv))
        captured = capsys.readouterr()
        return LabRun(code=code, stdout=captured.out, stderr=captured.err)

    return invoke

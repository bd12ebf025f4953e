from __future__ import annotations

import pytest

from cli.selftest import SUITES, selftest  # type: ignore
from config.settings import Settings


def checks_of(name: str, scale: float = 1.0) -> dict:
    (report,) = selftest(Settings(), tolerance_scale=scale, suites=[name])
    assert report.error is None, report.error
    return {c.name: c for c in report.checks}


def test_registry_covers_every_module() -> None:
    assert {
        "qubit-algebra",
        "tpm-distributions",
        "jarzynski-identity",
        "crooks",
        "tsirelson",
        "work-chsh",
        "sampler",
    } <= set(SUITES)


@pytest.mark.parametrize(
    "suite, expected",
    [
        ("qubit-algebra", {"overlap-closed-form", "evolution-group-law"}),
        (
            "tpm-distributions",
            {
                "final-generated-matches-quench",
                "first-marginal-is-thermal",
                "normalization",
                "low-temperature-jarzynski",
            },
        ),
        ("work-chsh", {"odd-moments-scale-with-tanh", "bloch-term-is-chsh"}),
    ],
)
def test_invariant_checks_pass(suite: str, expected: set) -> None:
    checks = checks_of(suite)
    assert expected <= set(checks)
    assert all(c.passed for c in checks.values())


def test_sampler_suite_checks_convergence_and_scaling() -> None:
    checks = checks_of("sampler")
    assert {"frequencies-within-5sigma", "std-error-shrinks-10x", "worker-count-invariance"} <= set(checks)
    assert all(c.passed for c in checks.values())


def test_negative_scale_fails_new_suites() -> None:
    reports = selftest(Settings(), tolerance_scale=-1.0, suites=["tpm-distributions", "work-chsh"])
    assert not any(r.passed for r in reports)

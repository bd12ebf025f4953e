"""
Desk-scale invariant suites.

Every check compares a nonnegative deviation with base_tolerance * scale,
where scale comes from SELFTEST__TOLERANCE_SCALE. A negative scale makes every
check fail, which is how the failure path is exercised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from config.settings import Settings
from packages.qubit_core.qubit_core import (
    IDENTITY,
    MAXIMALLY_MIXED,
    X_AXIS,
    Z_AXIS,
    TwoLevelHamiltonian,
    bloch_to_projector,
    projector_overlap,
    random_bloch,
    random_density,
    random_unitary,
    thermal_density,
    trace_product,
    unitary_from_hamiltonian,
)
from packages.sampler.sampler import (
    SamplerConfig,
    estimate_jarzynski,
    estimate_moments,
    outcome_frequencies,
    sample_trajectories,
)
from packages.shared.shared.errors import InvalidParameterError, ValidationFailure
from packages.shared.shared.logging import get_logger
from packages.temporal_bell.temporal_bell import (
    TSIRELSON_BOUND,
    CHSHSettings,
    TwoTimeSetting,
    canonical_chsh_settings,
    chsh_value,
    classical_chsh_bound,
    classical_three_setting_check,
    three_setting_bell,
    tsirelson_optimize,
    two_time_correlation,
)
from packages.tpm_engine.tpm_engine import (
    Explicit,
    FinalGenerated,
    ProtocolSpec,
    crooks_table,
    dissipated_work_average,
    jarzynski_average,
    joint_distribution,
    moment_closed_form,
    random_protocol,
    taylor_partial_sum,
    work_distribution,
    work_moment,
)
from packages.work_chsh.work_chsh import (
    WorkBellSettings,
    optimal_work_settings,
    protocol_work_bell_combination,
    work_bell_combination,
)
from schemas.documents import RunRequest
from .builders import THREE_SETTING_REFERENCE
from .output import Outcome, build_document

logger = get_logger("cli.selftest")


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass
class SuiteReport:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.checks) and all(c.passed for c in self.checks)

    def worst(self) -> Optional[CheckResult]:
        failed = [c for c in self.checks if not c.passed]
        return failed[0] if failed else None


class SuiteContext:
    def __init__(self, report: SuiteReport, settings: Settings, scale: float) -> None:
        self.report = report
        self.settings = settings
        self.scale = scale

    def rng(self, stream: int = 0) -> np.random.Generator:
        seed = self.settings.SELFTEST.seed
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))

    def check(self, name: str, deviation: float, base_tolerance: float) -> None:
        deviation = float(deviation)
        if math.isnan(deviation):
            deviation = math.inf
        self.report.checks.append(CheckResult(name, abs(deviation), base_tolerance * self.scale))

    def check_max(self, name: str, deviations: Iterable[float], base_tolerance: float) -> None:
        self.check(name, max(deviations, default=0.0), base_tolerance)


Suite = Callable[[SuiteContext], None]
SUITES: Dict[str, Suite] = {}


def suite(name: str) -> Callable[[Suite], Suite]:
    def register(fn: Suite) -> Suite:
        SUITES[name] = fn
        return fn

    return register


# ---------- suites ----------

@suite("qubit-algebra")
def _qubit_algebra(ctx: SuiteContext) -> None:
    rng = ctx.rng(1)
    unitarity, idempotence, completeness, traces = [], [], [], []
    overlaps, group_law = [], []
    for _ in range(100):
        u = random_unitary(rng).matrix
        unitarity.append(np.max(np.abs(u @ u.conj().T - IDENTITY)))
        axis = random_bloch(rng)
        p_plus = bloch_to_projector(axis, 1).matrix
        p_minus = bloch_to_projector(axis, -1).matrix
        idempotence.append(np.max(np.abs(p_plus @ p_plus - p_plus)))
        completeness.append(np.max(np.abs(p_plus + p_minus - IDENTITY)))
        rho = random_density(rng).matrix
        h = TwoLevelHamiltonian(float(rng.uniform(0.1, 2.0)), axis)
        gibbs = thermal_density(h, float(rng.uniform(0, 3))).matrix
        traces.append(max(abs(np.trace(rho) - 1.0), abs(np.trace(gibbs) - 1.0)))
        other = bloch_to_projector(random_bloch(rng), -1)
        closed = projector_overlap(other, bloch_to_projector(axis, 1))
        overlaps.append(abs(closed - trace_product(other.matrix, p_plus).real))
        h = TwoLevelHamiltonian(float(rng.uniform(0.1, 2.0)), axis)
        t1, t2 = (float(t) for t in rng.uniform(-10.0, 10.0, size=2))
        joined = unitary_from_hamiltonian(h, t1).compose(unitary_from_hamiltonian(h, t2)).matrix
        group_law.append(np.max(np.abs(joined - unitary_from_hamiltonian(h, t1 + t2).matrix)))
    ctx.check_max("unitarity", unitarity, 1e-12)
    ctx.check_max("projector-idempotence", idempotence, 1e-12)
    ctx.check_max("projector-completeness", completeness, 1e-12)
    ctx.check_max("unit-trace", traces, 1e-12)
    ctx.check_max("overlap-closed-form", overlaps, 1e-12)
    ctx.check_max("evolution-group-law", group_law, 1e-10)


@suite("two-time-correlations")
def _two_time(ctx: SuiteContext) -> None:
    rng = ctx.rng(2)
    spread, symmetry, closed = [], [], []
    for _ in range(20):
        a, b = random_bloch(rng), random_bloch(rng)
        mixed = two_time_correlation(TwoTimeSetting(a, b, MAXIMALLY_MIXED))
        closed.append(abs(mixed - a.dot(b)))
        symmetry.append(abs(mixed - two_time_correlation(TwoTimeSetting(b, a, MAXIMALLY_MIXED))))
        for _ in range(100):
            state = random_density(rng)
            spread.append(abs(two_time_correlation(TwoTimeSetting(a, b, state)) - mixed))
    ctx.check_max("state-independence", spread, 1e-12)
    ctx.check_max("time-symmetry", symmetry, 1e-12)
    ctx.check_max("bloch-dot", closed, 1e-12)


@suite("jarzynski-identity")
def _jarzynski(ctx: SuiteContext) -> None:
    rng = ctx.rng(3)
    deviations = [abs(jarzynski_average(random_protocol(rng)) - 1.0) for _ in range(1000)]
    ctx.check_max("random-protocols", deviations, 1e-10)


@suite("second-law")
def _second_law(ctx: SuiteContext) -> None:
    rng = ctx.rng(4)
    shortfalls = [max(0.0, -dissipated_work_average(random_protocol(rng))) for _ in range(200)]
    ctx.check_max("dissipated-work-nonnegative", shortfalls, 1e-12)


@suite("tpm-distributions")
def _tpm_distributions(ctx: SuiteContext) -> None:
    rng = ctx.rng(8)
    invariance, marginals, normalization = [], [], []
    for _ in range(200):
        quench = random_protocol(rng, evolution="quench")
        reference = joint_distribution(quench).table
        for t in (0.0, 0.3, 1.7, 10.0):
            moved = joint_distribution(replace(quench, evolution=FinalGenerated(t))).table
            invariance.append(np.max(np.abs(moved - reference)))
        spec = random_protocol(rng)
        joint = joint_distribution(spec)
        plus, minus = joint.first_marginal()
        marginals.append(
            max(abs(plus - spec.initial_state.population(1)), abs(minus - spec.initial_state.population(-1)))
        )
        normalization.append(max(abs(joint.table.sum() - 1.0), abs(work_distribution(spec).total() - 1.0)))
    ctx.check_max("final-generated-matches-quench", invariance, 1e-12)
    ctx.check_max("first-marginal-is-thermal", marginals, 1e-12)
    ctx.check_max("normalization", normalization, 1e-12)

    cold = []
    for beta in (50.0, 200.0, 1000.0):
        for e_f in (2.0, 0.5):
            spec = ProtocolSpec(TwoLevelHamiltonian(2.0, Z_AXIS), TwoLevelHamiltonian(e_f, X_AXIS), beta)
            cold.append(abs(jarzynski_average(spec) - 1.0))
    ctx.check_max("low-temperature-jarzynski", cold, 1e-12)


@suite("moment-closed-form")
def _moments(ctx: SuiteContext) -> None:
    rng = ctx.rng(5)
    deviations = []
    for _ in range(100):
        energy = 2.0 - float(rng.uniform(0.0, 2.0))
        beta = float(rng.uniform(0.0, 3.0))
        a, b = random_bloch(rng), random_bloch(rng)
        spec = ProtocolSpec(TwoLevelHamiltonian(energy, a), TwoLevelHamiltonian(energy, b), beta)
        for n in range(1, 11):
            closed = moment_closed_form(energy, beta, a.dot(b), n)
            # relative above unit magnitude; moments grow like (2E)^n
            deviations.append(abs(work_moment(spec, n) - closed) / max(1.0, abs(closed)))
    ctx.check_max("brute-force-vs-closed", deviations, 1e-10)


@suite("resummation")
def _resummation(ctx: SuiteContext) -> None:
    rng = ctx.rng(6)
    deviations = []
    for _ in range(100):
        energy = 2.0 - float(rng.uniform(0.0, 2.0))
        beta = float(rng.uniform(0.0, 2.0)) / energy
        spec = ProtocolSpec(
            TwoLevelHamiltonian(energy, random_bloch(rng)),
            TwoLevelHamiltonian(energy, random_bloch(rng)),
            beta,
            Explicit(random_unitary(rng)),
        )
        deviations.append(abs(taylor_partial_sum(spec, 40) - 1.0))
    ctx.check_max("taylor-K40", deviations, 1e-8)


@suite("tsirelson")
def _tsirelson(ctx: SuiteContext) -> None:
    opt = ctx.settings.OPTIMIZER
    found = tsirelson_optimize(opt.restarts, opt.seed, max_sweeps=opt.max_sweeps)
    ctx.check("optimizer-reaches-2sqrt2", abs(found.value - TSIRELSON_BOUND), 1e-6)
    best, _ = classical_chsh_bound()
    ctx.check("classical-enumeration-is-2", abs(best - 2.0), 1e-12)


@suite("work-chsh")
def _work_chsh(ctx: SuiteContext) -> None:
    first = WorkBellSettings.from_chsh(optimal_work_settings(1.0, 1.0, 1), 1.0, 1.0)
    target = 2.0 * math.tanh(1.0) * (math.sqrt(2.0) - 1.0)
    ctx.check("first-moment-extremum", abs(work_bell_combination(first, 1).value - target), 1e-6)
    ctx.check(
        "first-moment-four-runs",
        abs(protocol_work_bell_combination(first, 1) - work_bell_combination(first, 1).value),
        1e-10,
    )

    second = [
        work_bell_combination(WorkBellSettings.from_chsh(optimal_work_settings(1.0, b, 2), 1.0, b), 2).value
        for b in (0.1, 1.0, 10.0)
    ]
    ctx.check_max("second-moment-extremum", [abs(v - 4.0 * (1.0 + math.sqrt(2.0))) for v in second], 1e-9)
    ctx.check("second-moment-beta-free", max(second) - min(second), 1e-12)

    # odd moments carry the whole β dependence in tanh(βE)
    canonical = canonical_chsh_settings()
    spreads = []
    for n in (1, 3, 5):
        scaled = [
            work_bell_combination(WorkBellSettings.from_chsh(canonical, 1.0, b), n).value / math.tanh(b)
            for b in (0.1, 1.0, 10.0)
        ]
        spreads.append((max(scaled) - min(scaled)) / max(abs(v) for v in scaled))
    ctx.check_max("odd-moments-scale-with-tanh", spreads, 1e-12)

    rng = ctx.rng(9)
    bloch_terms = []
    for _ in range(50):
        s = CHSHSettings(random_bloch(rng), random_bloch(rng), random_bloch(rng), random_bloch(rng))
        combo = work_bell_combination(WorkBellSettings.from_chsh(s, 1.0, 1.0), 1)
        bloch_terms.append(abs(combo.chsh_bloch_term - chsh_value(MAXIMALLY_MIXED, s)))
    ctx.check_max("bloch-term-is-chsh", bloch_terms, 1e-12)

    collinear_2, collinear_1 = [], []
    axes = (Z_AXIS, Z_AXIS.negated())
    for a1 in axes:
        for a2 in axes:
            for b1 in axes:
                for b2 in axes:
                    s = WorkBellSettings.from_chsh(CHSHSettings(a1, a2, b1, b2), 1.0, 1.0)
                    v2 = work_bell_combination(s, 2).value
                    collinear_2.append(max(0.0, -v2, v2 - 8.0))
                    collinear_1.append(max(0.0, work_bell_combination(s, 1).value))
    ctx.check_max("classical-second-moment-in-[0,8E^2]", collinear_2, 1e-12)
    ctx.check_max("classical-first-moment-nonpositive", collinear_1, 1e-12)


@suite("crooks")
def _crooks(ctx: SuiteContext) -> None:
    rng = ctx.rng(7)
    deviations = []
    for _ in range(1000):
        for row in crooks_table(random_protocol(rng)):
            if row["ratio"] is None or min(row["p_forward"], row["p_backward"]) <= 1e-6:  # type: ignore[type-var]
                continue
            deviations.append(abs(row["ratio"] / row["expected"] - 1.0))  # type: ignore[operator]
    ctx.check_max("forward-backward-ratio", deviations, 1e-9)


@suite("three-setting")
def _three_setting(ctx: SuiteContext) -> None:
    rows = classical_three_setting_check("minus")
    ctx.check_max("classical-minus-holds", [max(0.0, r.rhs - r.lhs) for r in rows], 1e-12)
    a, b1, b2 = THREE_SETTING_REFERENCE
    res = three_setting_bell(MAXIMALLY_MIXED, a, b1, b2, "minus")
    ctx.check("quantum-minus-violated", max(0.0, res.lhs - res.rhs), 1e-12)


@suite("sampler")
def _sampler(ctx: SuiteContext) -> None:
    cfg_st = ctx.settings.SELFTEST
    spec = ProtocolSpec(TwoLevelHamiltonian(1.0, Z_AXIS), TwoLevelHamiltonian(1.0, X_AXIS), 1.0)
    cfg = SamplerConfig(seed=cfg_st.seed, samples=cfg_st.samples)
    jar = estimate_jarzynski(spec, cfg)
    ctx.check("jarzynski-within-4se", abs(jar.mean - 1.0) / max(jar.std_error, 1e-300), 4.0)
    for report, k in zip(estimate_moments(spec, cfg, [1, 2]), (1, 2)):
        deviation = abs(report.mean - work_moment(spec, k)) / max(report.std_error, 1e-300)
        ctx.check(f"moment-{k}-within-4se", deviation, 4.0)

    freq = outcome_frequencies(sample_trajectories(spec, cfg))
    table = joint_distribution(spec).table
    sigma = np.sqrt(table * (1.0 - table) / cfg.samples)
    ctx.check("frequencies-within-5sigma", float(np.max(np.abs(freq - table) / np.maximum(sigma, 1e-300))), 5.0)

    coarse = estimate_jarzynski(spec, SamplerConfig(seed=cfg_st.seed, samples=10_000))
    fine = estimate_jarzynski(spec, SamplerConfig(seed=cfg_st.seed + 1, samples=1_000_000))
    # 100x the samples should cut the error by about 10x; accept 5x to 20x
    ctx.check("std-error-shrinks-10x", math.log10(coarse.std_error / fine.std_error) - 1.0, math.log10(2.0))

    small = SamplerConfig(seed=cfg_st.seed, samples=20_000, chunk_size=3_000)
    one = estimate_jarzynski(spec, small)
    many = estimate_jarzynski(spec, small.model_copy(update={"workers": 3}))
    ctx.check("worker-count-invariance", abs(one.mean - many.mean) + abs(one.std_error - many.std_error), 1e-15)


# ---------- runner ----------

def selftest(
    settings: Settings,
    *,
    tolerance_scale: Optional[float] = None,
    suites: Optional[Iterable[str]] = None,
) -> List[SuiteReport]:
    scale = settings.SELFTEST.tolerance_scale if tolerance_scale is None else float(tolerance_scale)
    names = list(SUITES) if suites is None else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidParameterError("suite", f"unknown suite(s) {', '.join(unknown)}; known: {', '.join(SUITES)}")

    reports: List[SuiteReport] = []
    for name in names:
        report = SuiteReport(name)
        try:
            SUITES[name](SuiteContext(report, settings, scale))
        except Exception as exc:  # a crashing suite is a failing suite
            logger.exception("suite %s raised", name)
            report.error = f"{type(exc).__name__}: {exc}"
        logger.info("suite %s: %s", name, "pass" if report.passed else "FAIL")
        reports.append(report)
    return reports


def run_selftest(req: RunRequest, settings: Settings) -> Outcome:
    reports = selftest(settings, suites=req.suites)
    results: Dict[str, object] = {r.name: r.passed for r in reports}
    results["failed"] = sum(1 for r in reports if not r.passed)

    notes: List[str] = []
    failures: List[ValidationFailure] = []
    for r in reports:
        if r.passed:
            notes.append(f"PASS {r.name}")
            continue
        bad = r.worst()
        if r.error is not None:
            notes.append(f"FAIL {r.name}: {r.error}")
            failures.append(ValidationFailure(r.name, math.inf, 0.0, detail=r.error))
        elif bad is not None:
            notes.append(f"FAIL {r.name}: {bad.name} deviation {bad.deviation:.3e} > tolerance {bad.tolerance:.3e}")
            failures.append(ValidationFailure(r.name, bad.deviation, bad.tolerance, detail=bad.name))
        else:
            notes.append(f"FAIL {r.name}: no checks ran")
            failures.append(ValidationFailure(r.name, math.inf, 0.0, detail="no checks ran"))

    rows = [[k + 1, r.passed, len(r.checks)] for k, r in enumerate(reports)]
    doc = build_document(
        req,
        results,
        columns=["suite", "passed", "checks"],
        rows=rows,
        notes=notes,
        digits=settings.OUTPUT.significant_digits,
    )
    return Outcome(doc, failures)

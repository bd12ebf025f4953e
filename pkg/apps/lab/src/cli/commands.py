"""
Subcommand handlers.

Each handler takes the validated RunRequest plus Settings and returns an
Outcome: the result document and any numerical checks that failed. The entry
point prints the document either way and exits 3 when a check failed.
"""
from __future__ import annotations

from typing import Any, Callable, Dict, List, Optional, Sequence

from config.settings import Settings
from packages.qubit_core.qubit_core import MAXIMALLY_MIXED
from packages.sampler.sampler import (
    SamplerConfig,
    estimate_free_energy,
    estimate_jarzynski,
    estimate_moments,
    outcome_frequencies,
    sample_trajectories,
)
from packages.shared.shared.errors import DegenerateSupportError, ValidationFailure
from packages.shared.shared.logging import get_logger
from packages.shared.shared.types import OUTCOME_ORDER
from packages.temporal_bell.temporal_bell import (
    CLASSICAL_CHSH_BOUND,
    TSIRELSON_BOUND,
    VIOLATION_SLACK,
    TwoTimeSetting,
    chsh_closed_form,
    chsh_value,
    classical_chsh_bound,
    classical_chsh_range,
    classical_three_setting_check,
    enumerate_classical_strategies,
    three_setting_bell,
    tsirelson_optimize,
    two_time_correlation,
)
from packages.tpm_engine.tpm_engine import (
    BackwardMode,
    SuddenQuench,
    crooks_expected,
    crooks_ratio,
    crooks_table,
    dissipated_work_average,
    exponential_work_average,
    free_energy_difference,
    jarzynski_average,
    joint_distribution,
    moment_closed_form,
    work_distribution,
    work_moment,
)
from packages.work_chsh.work_chsh import (
    classical_work_bounds,
    exp_work_bell_combination,
    moment_prefactor,
    protocol_work_bell_combination,
    quantum_work_extrema,
    settings_optimizer,
    three_setting_work,
    work_bell_combination,
)
from schemas.documents import ResultDocument, RunRequest
from .builders import (
    chsh_from,
    protocol_from,
    three_setting_from,
    work_bell_from,
)
from .output import Outcome, build_document
from .scan import run_scan
from .selftest import run_selftest

logger = get_logger("cli.commands")

# Pairs whose forward or backward probability is below this are left out of --check.
CROOKS_CHECK_FLOOR = 1e-9
# --check on a sampled estimate allows this many standard errors.
SAMPLED_CHECK_SIGMAS = 4.0

CONVENTION_NOTES = {
    "minus": (
        "three-setting convention 'minus': 1 - <B1B2> >= |<AB1> - <AB2>| (sequential same-system form); "
        "--convention plus selects the anticorrelated-pair form 1 + <B1B2> >= |<AB1> - <AB2>|"
    ),
    "plus": (
        "three-setting convention 'plus': 1 + <B1B2> >= |<AB1> - <AB2>| (anticorrelated-pair form); "
        "deterministic sequential strategies can already break it"
    ),
}


Handler = Callable[[RunRequest, Settings], Outcome]

_SIGN_TAG = {1: "p", -1: "m"}


def _order(req: RunRequest, default: int) -> int:
    return default if req.order is None else req.order


def _document(
    req: RunRequest,
    settings: Settings,
    results: Dict[str, Any],
    *,
    columns: Optional[Sequence[str]] = None,
    rows: Optional[List[List[Any]]] = None,
    notes: Optional[List[str]] = None,
) -> ResultDocument:
    return build_document(
        req,
        results,
        columns=columns,
        rows=rows,
        notes=notes,
        digits=settings.OUTPUT.significant_digits,
    )


def _evolution_notes(req: RunRequest) -> List[str]:
    notes: List[str] = []
    if req.evolution == "quench" and req.time != 0.0:
        notes.append("--time is ignored for a sudden quench (U = I)")
    return notes


def _sampler_config(req: RunRequest, settings: Settings) -> SamplerConfig:
    return SamplerConfig(
        seed=settings.SAMPLER.seed if req.seed is None else req.seed,
        samples=settings.SAMPLER.samples if req.samples is None else req.samples,
        workers=settings.SAMPLER.workers if req.workers is None else req.workers,
        chunk_size=settings.SAMPLER.chunk_size,
    )


# ---------- two-point-measurement protocol ----------

def run_jarzynski(req: RunRequest, settings: Settings) -> Outcome:
    spec = protocol_from(req)
    value = jarzynski_average(spec)
    deviation = abs(value - 1.0)
    results = {
        "jarzynski": value,
        "deviation": deviation,
        "exp_work_average": exponential_work_average(spec),
        "delta_f": free_energy_difference(spec),
        "dissipated_work": dissipated_work_average(spec),
    }
    notes = _evolution_notes(req)
    if not spec.equal_spectra:
        notes.append("identity evaluated as <exp(beta*(W + dF))> with W = E_i - E_f and dF = F_f - F_i")
    failures: List[ValidationFailure] = []
    if req.check and deviation > req.tolerance:
        failures.append(ValidationFailure("jarzynski-identity", deviation, req.tolerance))
    return Outcome(_document(req, settings, results, notes=notes), failures)


def run_moments(req: RunRequest, settings: Settings) -> Outcome:
    spec = protocol_from(req)
    top = _order(req, 4)
    closed = spec.equal_spectra and isinstance(spec.evolution, SuddenQuench)
    c = spec.initial.axis.dot(spec.final.axis)
    results: Dict[str, Any] = {}
    rows: List[List[Any]] = []
    for k in range(1, top + 1):
        value = work_moment(spec, k)
        results[f"moment_{k}"] = value
        row: List[Any] = [k, value]
        if closed:
            reference = moment_closed_form(spec.initial.energy, spec.beta, c, k)
            results[f"moment_{k}_closed_form"] = reference
            row.append(reference)
        rows.append(row)
    results["dissipated_work"] = dissipated_work_average(spec)
    columns = ["k", "moment", "closed_form"] if closed else ["k", "moment"]
    notes = _evolution_notes(req)
    if not closed:
        notes.append("closed form applies to equal spectra with a sudden quench only")
    return Outcome(_document(req, settings, results, columns=columns, rows=rows, notes=notes))


def run_work_dist(req: RunRequest, settings: Settings) -> Outcome:
    spec = protocol_from(req)
    joint = joint_distribution(spec)
    dist = work_distribution(spec)
    results: Dict[str, Any] = {}
    for (n, m), prob in joint.items():
        results[f"p_{_SIGN_TAG[n]}{_SIGN_TAG[m]}"] = prob
    results["support_points"] = len(dist)
    results["total_probability"] = dist.total()
    rows = [[v.w, v.prob] for v in dist]
    return Outcome(
        _document(req, settings, results, columns=["w", "probability"], rows=rows, notes=_evolution_notes(req))
    )


def run_crooks(req: RunRequest, settings: Settings) -> Outcome:
    spec = protocol_from(req)
    mode = BackwardMode(req.backward_mode)
    table = crooks_table(spec, mode)
    columns = ["n", "m", "work", "p_forward", "p_backward", "ratio", "expected"]
    rows = [[row[c] for c in columns] for row in table]

    worst = 0.0
    degenerate = 0
    for row in table:
        if row["ratio"] is None:
            degenerate += 1
            continue
        if min(row["p_forward"], row["p_backward"]) <= CROOKS_CHECK_FLOOR:  # type: ignore[type-var]
            continue
        worst = max(worst, abs(row["ratio"] / row["expected"] - 1.0))  # type: ignore[operator]

    results: Dict[str, Any] = {
        "delta_f": free_energy_difference(spec),
        "max_relative_deviation": worst,
        "degenerate_pairs": degenerate,
    }
    notes = _evolution_notes(req)
    if req.outcome_n is not None and req.outcome_m is not None:
        n, m = req.outcome_n, req.outcome_m
        results["expected"] = crooks_expected(spec, n, m)
        try:
            results["ratio"] = crooks_ratio(spec, n, m, mode=mode)
        except DegenerateSupportError as exc:
            results["ratio"] = None
            notes.append(str(exc))
    if mode is BackwardMode.INITIAL_HT:
        notes.append("backward evolution e^{+iH_i t}: the exact inverse of the forward run only when H_i = H_f")
    failures: List[ValidationFailure] = []
    if req.check and worst > req.tolerance:
        failures.append(ValidationFailure("crooks", worst, req.tolerance, detail=f"backward mode {mode.value}"))
    return Outcome(_document(req, settings, results, columns=columns, rows=rows, notes=notes), failures)


# ---------- temporal Bell ----------

def run_chsh(req: RunRequest, settings: Settings) -> Outcome:
    s = chsh_from(req)
    value = chsh_value(MAXIMALLY_MIXED, s)
    results: Dict[str, Any] = {"chsh": value, "chsh_closed_form": chsh_closed_form(s)}
    for (first, second, _), name in zip(s.pairs(), ("a1b1", "a1b2", "a2b1", "a2b2")):
        results[f"corr_{name}"] = two_time_correlation(TwoTimeSetting(first, second))
    results.update(
        classical_bound=CLASSICAL_CHSH_BOUND,
        tsirelson_bound=TSIRELSON_BOUND,
        violates_classical=abs(value) > CLASSICAL_CHSH_BOUND + VIOLATION_SLACK,
    )
    notes = ["canonical axes a1=z, a2=(z+x)/sqrt2, b1=z, b2=(z-x)/sqrt2"] if req.optimal else []
    return Outcome(_document(req, settings, results, notes=notes))


def run_bell3(req: RunRequest, settings: Settings) -> Outcome:
    a, b1, b2 = three_setting_from(req)
    res = three_setting_bell(MAXIMALLY_MIXED, a, b1, b2, req.convention)
    classical = classical_three_setting_check(req.convention)
    order = _order(req, 1)
    results = {
        "lhs": res.lhs,
        "rhs": res.rhs,
        "violated": res.violated,
        "corr_ab1": two_time_correlation(TwoTimeSetting(a, b1)),
        "corr_ab2": two_time_correlation(TwoTimeSetting(a, b2)),
        "corr_b1b2": two_time_correlation(TwoTimeSetting(b1, b2)),
        "classical_violations": sum(1 for row in classical if not row.holds),
    }
    notes = [CONVENTION_NOTES[req.convention]]
    if order >= 1:
        results[f"work_three_setting_{order}"] = three_setting_work(
            a, b1, b2, req.energy, req.beta, order, req.convention
        )
    rows = [[row.a, row.b1, row.b2, row.lhs, row.rhs, row.holds] for row in classical]
    return Outcome(
        _document(req, settings, results, columns=["a", "b1", "b2", "lhs", "rhs", "holds"], rows=rows, notes=notes)
    )


def run_classical_bounds(req: RunRequest, settings: Settings) -> Outcome:
    order = _order(req, 1)
    best, argmax = classical_chsh_bound()
    low, high = classical_chsh_range()
    w_lo, w_hi = classical_work_bounds(req.energy, req.beta, order)
    q_lo, q_hi = quantum_work_extrema(req.energy, req.beta, order)
    results = {
        "chsh_classical_max": best,
        "chsh_classical_min": low,
        "tsirelson_bound": TSIRELSON_BOUND,
        "work_classical_min": w_lo,
        "work_classical_max": w_hi,
        "work_quantum_min": q_lo,
        "work_quantum_max": q_hi,
    }
    if high != best:
        logger.error("classical range max %s disagrees with enumeration max %s", high, best)
    rows = [[s.a1, s.a2, s.b1, s.b2, s.value()] for s in enumerate_classical_strategies()]
    notes = [f"a maximizing strategy: a1={argmax.a1:+d}, a2={argmax.a2:+d}, b1={argmax.b1:+d}, b2={argmax.b2:+d}"]
    return Outcome(
        _document(req, settings, results, columns=["a1", "a2", "b1", "b2", "value"], rows=rows, notes=notes)
    )


def run_optimize(req: RunRequest, settings: Settings) -> Outcome:
    restarts = settings.OPTIMIZER.restarts if req.restarts is None else req.restarts
    seed = settings.OPTIMIZER.seed if req.seed is None else req.seed
    workers = 1 if req.workers is None else req.workers
    max_sweeps = settings.OPTIMIZER.max_sweeps
    if req.target == "chsh":
        found = tsirelson_optimize(restarts, seed, max_sweeps=max_sweeps, workers=workers)
        axes = found.settings
        target = TSIRELSON_BOUND
    else:
        order = _order(req, 1)
        work = settings_optimizer(
            req.energy, req.beta, order, restarts, seed, workers=workers, max_sweeps=max_sweeps
        )
        found, axes = work, work.settings.chsh()
        target = quantum_work_extrema(req.energy, req.beta, order)[1]
    results = {
        "value": found.value,
        "restart": found.restart,
        "closed_form_optimum": target,
        "gap": abs(target - found.value),
    }
    rows = [[k + 1, *v.as_tuple()] for k, v in enumerate((axes.a1, axes.a2, axes.b1, axes.b2))]
    notes = ["rows are the axes a1, a2, b1, b2 in order"]
    return Outcome(_document(req, settings, results, columns=["axis", "x", "y", "z"], rows=rows, notes=notes))


# ---------- work combinations ----------

def run_work_bell(req: RunRequest, settings: Settings) -> Outcome:
    order = _order(req, 1)
    s = work_bell_from(req, order)
    combo = work_bell_combination(s, order)
    c_lo, c_hi = classical_work_bounds(s.energy, s.beta, order)
    q_lo, q_hi = quantum_work_extrema(s.energy, s.beta, order)
    results = {
        "work_bell": combo.value,
        "work_bell_protocol": protocol_work_bell_combination(s, order),
        "chsh_bloch_term": combo.chsh_bloch_term,
        "moment_prefactor": moment_prefactor(s.energy, s.beta, order),
        "classical_min": c_lo,
        "classical_max": c_hi,
        "quantum_min": q_lo,
        "quantum_max": q_hi,
        "exceeds_classical": combo.value > c_hi + VIOLATION_SLACK or combo.value < c_lo - VIOLATION_SLACK,
        "exp_work_bell": exp_work_bell_combination(s).combination,
    }
    notes: List[str] = []
    if req.optimal:
        if moment_prefactor(s.energy, s.beta, order) > 0.0:
            notes.append("optimal axes: canonical CHSH axes with both final axes negated (S = -2*sqrt2)")
        else:
            notes.append("optimal axes: canonical CHSH axes (S = 2*sqrt2)")
    return Outcome(_document(req, settings, results, notes=notes))


# ---------- Monte Carlo ----------

def run_sample(req: RunRequest, settings: Settings) -> Outcome:
    spec = protocol_from(req)
    cfg = _sampler_config(req, settings)
    top = _order(req, 2)

    jar = estimate_jarzynski(spec, cfg)
    results: Dict[str, Any] = {
        "jarzynski_mean": jar.mean,
        "jarzynski_std_error": jar.std_error,
        "jarzynski_exact": jarzynski_average(spec),
    }
    for report, k in zip(estimate_moments(spec, cfg, list(range(1, top + 1))), range(1, top + 1)):
        results[f"moment_{k}_mean"] = report.mean
        results[f"moment_{k}_std_error"] = report.std_error
        results[f"moment_{k}_exact"] = work_moment(spec, k)
    if spec.beta > 0.0:
        fe = estimate_free_energy(spec, cfg)
        results["free_energy_mean"] = fe.mean
        results["free_energy_std_error"] = fe.std_error
        results["free_energy_exact"] = free_energy_difference(spec)
    results["samples"] = cfg.samples
    results["single_sample"] = jar.single_sample

    freq = outcome_frequencies(sample_trajectories(spec, cfg))
    joint = joint_distribution(spec)
    rows = [
        [n, m, spec.work(n, m), float(freq[0 if n > 0 else 1, 0 if m > 0 else 1]), joint.p(n, m)]
        for n, m in OUTCOME_ORDER
    ]
    notes = _evolution_notes(req)
    if jar.single_sample:
        notes.append("single sample: standard errors are reported as 0")

    failures: List[ValidationFailure] = []
    if req.check:
        deviation = abs(jar.mean - 1.0)
        allowed = SAMPLED_CHECK_SIGMAS * jar.std_error if jar.std_error > 0.0 else req.tolerance
        if deviation > allowed:
            failures.append(ValidationFailure("sampled-jarzynski", deviation, allowed, detail=f"N={cfg.samples}"))
    columns = ["n", "m", "w", "frequency", "probability"]
    return Outcome(_document(req, settings, results, columns=columns, rows=rows, notes=notes), failures)


COMMANDS: Dict[str, Handler] = {
    "jarzynski": run_jarzynski,
    "moments": run_moments,
    "work-dist": run_work_dist,
    "chsh": run_chsh,
    "bell3": run_bell3,
    "work-bell": run_work_bell,
    "classical-bounds": run_classical_bounds,
    "optimize": run_optimize,
    "crooks": run_crooks,
    "sample": run_sample,
    "scan": run_scan,
    "selftest": run_selftest,
}


def dispatch(req: RunRequest, settings: Settings) -> Outcome:
    handler = COMMANDS[req.command]
    logger.debug("dispatching %s", req.command)
    return handler(req, settings)

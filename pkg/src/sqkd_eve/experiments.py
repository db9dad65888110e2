"""Monte Carlo harness, analytic-vs-empirical comparisons, and CSV export.

Empirical estimates are binomial proportions reported with a 3-sigma
half-width, 3*sqrt(mean(1-mean)/trials).  Success probabilities come from
either the formula-replay sampler (equal-weight two-way combination, the
default validation target) or full protocol runs (always used for the
independent-guess model, whose combined success is exactly 1/2 + eps1
rather than the equal-weight average; `verify_all` reports that gap as a
documented model divergence, not a failure).

CSV formats are pinned byte-for-byte: curve files use the header
`D,pe1,a1,pe2_match,pe2_mismatch,pe2_avg,a2_avg,pe2_match_H,pe2_avg_H,a2_avg_H`
and comparison files
`D,quantity,analytic,empirical_mean,trials,ci_halfwidth,pass`,
all values with 6 decimal places and "\n" line endings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from . import analytic
from .analytic import CurvePoint, crossover_disturbance, sample_curve
from .channel import (
    CombinationMode,
    derive_rng,
    enumerate_independent_success,
    sample_combined_correct,
)
from .errors import DomainError
from .protocol import (
    EveNone,
    EveOneWay,
    EveStrategy,
    EveTwoWay,
    ProtocolConfig,
    Variant,
    choose_strategy,
    resolve_strategy,
    run_protocol,
)
from .statevector import CTRL, SIFT, roundtrip_error

# Protocol batch size for estimate loops: one run of n=1024 scores 1024
# INFO bits, so a million-bit estimate needs under a thousand runs.
_BATCH_N = 1024
# Replay streams must never collide with protocol run streams, whose key
# is the bare run index; a large sentinel prefix keeps them disjoint.
_REPLAY_STREAM = 2_000_003


class StrategyKind(Enum):
    """Attacker selector used by the estimate API and the CLI."""

    NONE = "none"
    ONE_WAY = "one-way"
    TWO_WAY = "two-way"
    AUTO = "auto"


def build_strategy(
    kind: StrategyKind,
    D: float,
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS,
) -> EveStrategy:
    """Concrete attack at disturbance D for a strategy selector."""
    if kind is StrategyKind.NONE:
        if D != 0.0:
            raise DomainError("strategy NONE induces no disturbance; use D=0")
        return EveNone()
    if kind is StrategyKind.ONE_WAY:
        return EveOneWay(disturbance=D)
    if kind is StrategyKind.TWO_WAY:
        return EveTwoWay.at_disturbance(D, mode)
    return choose_strategy(D, mode)


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    trials: int
    half_width_3sigma: float

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials!r}")
        if not 0.0 <= self.mean <= 1.0:
            raise DomainError(f"mean must lie in [0, 1], got {self.mean!r}")

    @classmethod
    def from_counts(cls, successes: int, trials: int) -> "EstimateWithCI":
        if not 0 <= successes <= trials:
            raise DomainError(
                f"successes must lie in [0, trials], got {successes!r}/{trials!r}"
            )
        mean = successes / trials
        half_width = 3.0 * math.sqrt(mean * (1.0 - mean) / trials)
        return cls(mean=mean, trials=trials, half_width_3sigma=half_width)


class Quantity(Enum):
    PE1 = "PE1"
    PE2_AVG = "PE2_AVG"
    PE2_AVG_H = "PE2_AVG_H"
    DISTURBANCE_TEST = "DISTURBANCE_TEST"
    DISTURBANCE_CTRL = "DISTURBANCE_CTRL"


_SUCCESS_FORMS = {
    Quantity.PE1: analytic.pe_one_way,
    Quantity.PE2_AVG: analytic.pe_two_way_avg,
    Quantity.PE2_AVG_H: analytic.pe_two_way_avg_H,
}


def analytic_success(quantity: Quantity, D: float) -> float:
    """Closed-form target for a success-probability quantity."""
    try:
        return _SUCCESS_FORMS[quantity](D)
    except KeyError:
        raise DomainError(f"{quantity} is not a success quantity") from None


@dataclass(frozen=True)
class ComparisonRow:
    D: float
    quantity: Quantity
    analytic: float
    empirical: EstimateWithCI
    within_ci: bool

    @classmethod
    def build(
        cls, D: float, quantity: Quantity, analytic_value: float, empirical: EstimateWithCI
    ) -> "ComparisonRow":
        within = abs(analytic_value - empirical.mean) <= empirical.half_width_3sigma
        return cls(
            D=D,
            quantity=quantity,
            analytic=analytic_value,
            empirical=empirical,
            within_ci=within,
        )


def _check_trials(trials: int) -> int:
    if trials < 10_000:
        raise DomainError(f"trials must be >= 10000, got {trials!r}")
    return int(trials)


def _estimate_config(
    variant: Variant, eve: EveStrategy, seed: int
) -> ProtocolConfig:
    # Thresholds at 1.0 cannot be strictly exceeded, so no run aborts and
    # every run contributes its full n INFO bits.
    return ProtocolConfig(
        variant=variant,
        n=_BATCH_N,
        delta=1.0,
        ctrl_threshold_z=1.0,
        ctrl_threshold_x=1.0,
        test_threshold=1.0,
        eve=eve,
        seed=seed,
    )


def estimate_success(
    strategy: StrategyKind,
    variant: Variant,
    D: float,
    trials: int,
    seed: int = 0,
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS,
) -> EstimateWithCI:
    """Empirical probability that the attacker's combined guess is right.

    Scores at least `trials` INFO bits.  The equal-weight two-way model is
    sampled by formula replay (cheap and exactly the quantity the closed
    forms describe); every other strategy runs full protocol rounds.
    """
    trials = _check_trials(trials)
    eve = resolve_strategy(build_strategy(strategy, D, mode))

    if isinstance(eve, EveTwoWay) and eve.mode is CombinationMode.PAPER_WEIGHTS:
        eps1 = eve.advantage
        eps2 = eps1 / 2.0 if variant is Variant.HADAMARD_BOB else eps1
        rng = derive_rng(seed, _REPLAY_STREAM, 1 if variant is Variant.HADAMARD_BOB else 0)
        correct, _ = sample_combined_correct(
            eps1, eps2, CombinationMode.PAPER_WEIGHTS, rng, size=trials
        )
        return EstimateWithCI.from_counts(int(correct.sum()), trials)

    config = _estimate_config(variant, eve, seed)
    successes = 0
    total = 0
    run_index = 0
    while total < trials:
        result = run_protocol(config, run_index=run_index)
        run_index += 1
        successes += int((result.eve_info_guesses == result.alice_info).sum())
        total += int(result.alice_info.size)
    return EstimateWithCI.from_counts(successes, total)


def estimate_disturbance(
    variant: Variant,
    eve: EveStrategy,
    trials: int,
    seed: int = 0,
) -> tuple[EstimateWithCI, EstimateWithCI]:
    """Empirical (TEST, CTRL) error rates over >= `trials` bits each."""
    trials = _check_trials(trials)
    config = _estimate_config(variant, resolve_strategy(eve), seed)
    test_errors = test_total = 0
    ctrl_errors = ctrl_total = 0
    run_index = 0
    while test_total < trials or ctrl_total < trials:
        result = run_protocol(config, run_index=run_index)
        run_index += 1
        test_errors += result.test_errors
        test_total += config.n
        ctrl_errors += result.ctrl_errors_z + result.ctrl_errors_x
        ctrl_total += result.ctrl_count_z + result.ctrl_count_x
    return (
        EstimateWithCI.from_counts(test_errors, test_total),
        EstimateWithCI.from_counts(ctrl_errors, ctrl_total),
    )


def induced_disturbance(eve: EveStrategy) -> float:
    """Channel disturbance a strategy produces on checked bits."""
    eve = resolve_strategy(eve)
    if isinstance(eve, EveNone):
        return 0.0
    return eve.disturbance


def monte_carlo_rows(
    D: float,
    trials: int,
    seed: int = 0,
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS,
) -> tuple[ComparisonRow, ...]:
    """Five comparison rows at one disturbance: three attacker success
    probabilities plus the TEST/CTRL disturbance seen under the two-way
    attack."""
    rows = []
    specs = (
        (Quantity.PE1, StrategyKind.ONE_WAY, Variant.CLASSICAL_BOB),
        (Quantity.PE2_AVG, StrategyKind.TWO_WAY, Variant.CLASSICAL_BOB),
        (Quantity.PE2_AVG_H, StrategyKind.TWO_WAY, Variant.HADAMARD_BOB),
    )
    for quantity, kind, variant in specs:
        empirical = estimate_success(kind, variant, D, trials, seed, mode)
        rows.append(
            ComparisonRow.build(D, quantity, analytic_success(quantity, D), empirical)
        )
    eve = EveTwoWay.at_disturbance(D, mode)
    test_est, ctrl_est = estimate_disturbance(Variant.CLASSICAL_BOB, eve, trials, seed)
    rows.append(ComparisonRow.build(D, Quantity.DISTURBANCE_TEST, D, test_est))
    rows.append(ComparisonRow.build(D, Quantity.DISTURBANCE_CTRL, D, ctrl_est))
    return tuple(rows)


@dataclass(frozen=True)
class CurveTables:
    """Full-range advantage curves plus the magnified low-D table."""

    full: tuple[CurvePoint, ...]
    magnified: tuple[CurvePoint, ...]


def advantage_tables(steps: int = 101, magnified_steps: int = 91) -> CurveTables:
    """Analytic curve tables over [0, 0.5] and the magnified [0, 0.09]."""
    return CurveTables(
        full=tuple(sample_curve(0.0, 0.5, steps)),
        magnified=tuple(sample_curve(0.0, 0.09, magnified_steps)),
    )


CURVES_HEADER = "D,pe1,a1,pe2_match,pe2_mismatch,pe2_avg,a2_avg,pe2_match_H,pe2_avg_H,a2_avg_H"
COMPARISONS_HEADER = "D,quantity,analytic,empirical_mean,trials,ci_halfwidth,pass"


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def curves_csv(points: Iterable[CurvePoint]) -> str:
    lines = [CURVES_HEADER]
    for pt in points:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    pt.d,
                    pt.pe1,
                    pt.a1,
                    pt.pe2_match,
                    pt.pe2_mismatch,
                    pt.pe2_avg,
                    pt.a2_avg,
                    pt.pe2_match_h,
                    pt.pe2_avg_h,
                    pt.a2_avg_h,
                )
            )
        )
    return "\n".join(lines) + "\n"


def comparisons_csv(rows: Iterable[ComparisonRow]) -> str:
    lines = [COMPARISONS_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                (
                    _fmt(row.D),
                    row.quantity.value,
                    _fmt(row.analytic),
                    _fmt(row.empirical.mean),
                    str(row.empirical.trials),
                    _fmt(row.empirical.half_width_3sigma),
                    "true" if row.within_ci else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    note: str = ""


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple[CheckResult, ...]
    rows: tuple[ComparisonRow, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def render(self) -> str:
        lines = []
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"[{status}] {check.name}: {check.detail}")
            if check.note:
                lines.append(f"       note: {check.note}")
        verdict = "all checks passed" if self.all_passed else "some checks FAILED"
        lines.append(f"{len(self.checks)} checks: {verdict}")
        return "\n".join(lines) + "\n"


_MC_GRID = (0.02, 0.05, 0.1, 0.25)
_DIVERGENCE_NOTE = (
    "documented model divergence: with independent per-leg guesses the "
    "combination rule always returns the forward guess, so the protocol "
    "converges to 1/2 + eps1, not the equal-weight average"
)


def _identity_checks(grid_size: int) -> list[CheckResult]:
    grid = [0.5 * i / (grid_size - 1) for i in range(grid_size)]
    tol = 1e-12

    def posterior_at(D: float, halve_backward: bool) -> float:
        eps = math.sqrt(D / 2.0)
        eps2 = eps / 2.0 if halve_backward else eps
        return analytic.posterior_match(eps, eps2)

    specs = (
        (
            "identity match=posterior",
            analytic.pe_two_way_match,
            lambda D: posterior_at(D, halve_backward=False),
        ),
        (
            "identity avg=half-weighted",
            analytic.pe_two_way_avg,
            lambda D: 0.5 * (analytic.pe_two_way_match(D) + analytic.pe_two_way_mismatch(D)),
        ),
        (
            "identity matchH=posterior-halved",
            analytic.pe_two_way_match_H,
            lambda D: posterior_at(D, halve_backward=True),
        ),
        (
            "identity avgH=half-weighted",
            analytic.pe_two_way_avg_H,
            lambda D: 0.5 * (analytic.pe_two_way_match_H(D) + analytic.pe_two_way_mismatch(D)),
        ),
    )
    checks = []
    for name, closed, reference in specs:
        worst = max(abs(closed(D) - reference(D)) for D in grid)
        checks.append(
            CheckResult(
                name=name,
                passed=worst <= tol,
                detail=f"max deviation {worst:.3e} on {grid_size}-point grid (tol 1e-12)",
            )
        )
    return checks


def _roundtrip_check() -> CheckResult:
    worst = 0.0
    for i in range(11):
        p = 0.05 * i
        expected = 2.0 * p * (1.0 - p)
        for interaction_mode in (SIFT, CTRL):
            worst = max(worst, abs(roundtrip_error(p, interaction_mode) - expected))
    return CheckResult(
        name="statevector roundtrip",
        passed=worst <= 1e-10,
        detail=f"max |roundtrip - 2p(1-p)| = {worst:.3e} over p grid (tol 1e-10)",
    )


def _crossover_check() -> CheckResult:
    d_star = crossover_disturbance()
    offset = abs(d_star - 0.0877)
    lhs = (3.0 + 2.0 * d_star) ** 2
    rhs = 8.0 * (1.0 - d_star) * (1.0 + 2.0 * d_star) ** 2
    residual = abs(lhs - rhs)
    return CheckResult(
        name="crossover root",
        passed=offset <= 5e-5 and residual <= 1e-8,
        detail=f"D* = {d_star:.10f}, |D* - 0.0877| = {offset:.2e}, residual {residual:.2e}",
    )


def _enumeration_check() -> CheckResult:
    worst = 0.0
    for i in range(11):
        eps1 = 0.05 * i
        for j in range(11):
            eps2 = 0.05 * j
            value = enumerate_independent_success(eps1, eps2)
            worst = max(worst, abs(value - (0.5 + eps1)))
    return CheckResult(
        name="independent-combination enumeration",
        passed=worst <= 1e-12,
        detail=f"max |success - (1/2 + eps1)| = {worst:.3e} over eps grid (tol 1e-12)",
        note=_DIVERGENCE_NOTE,
    )


def _monte_carlo_checks(
    trials: int, seed: int, mode: CombinationMode
) -> tuple[list[CheckResult], list[ComparisonRow]]:
    independent = mode is CombinationMode.INDEPENDENT
    checks = []
    rows = []
    for D in _MC_GRID:
        for row in monte_carlo_rows(D, trials, seed, mode):
            rows.append(row)
            name = f"monte-carlo D={D:g} {row.quantity.value}"
            deviation = abs(row.analytic - row.empirical.mean)
            detail = (
                f"analytic {row.analytic:.6f}, empirical {row.empirical.mean:.6f} "
                f"+- {row.empirical.half_width_3sigma:.6f} ({row.empirical.trials} trials)"
            )
            divergent_quantity = row.quantity in (Quantity.PE2_AVG, Quantity.PE2_AVG_H)
            if independent and divergent_quantity:
                # The protocol under independent guessing tracks the
                # forward-guess success, so compare against that instead.
                target = analytic.pe_two_way_mismatch(D)
                passed = abs(target - row.empirical.mean) <= row.empirical.half_width_3sigma
                checks.append(
                    CheckResult(
                        name=name,
                        passed=passed,
                        detail=detail + f"; divergence target {target:.6f}",
                        note=_DIVERGENCE_NOTE,
                    )
                )
            else:
                checks.append(
                    CheckResult(
                        name=name,
                        passed=row.within_ci,
                        detail=detail + f", deviation {deviation:.6f}",
                    )
                )
    return checks, rows


def verify_all(
    grid_size: int = 1000,
    trials: int = 1_000_000,
    seed: int = 0,
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS,
) -> VerifyReport:
    """Run the oracle suites and return per-check pass/fail with deviations."""
    if grid_size < 2:
        raise DomainError(f"grid_size must be >= 2, got {grid_size!r}")
    trials = _check_trials(trials)
    checks = [_roundtrip_check()]
    checks.extend(_identity_checks(grid_size))
    mc_checks, rows = _monte_carlo_checks(trials, seed, mode)
    checks.extend(mc_checks)
    checks.append(_crossover_check())
    checks.append(_enumeration_check())
    return VerifyReport(checks=tuple(checks), rows=tuple(rows))

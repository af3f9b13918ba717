"""
Canned experiment configurations and the sweeps and scans run over them.

Analyzer coefficients are stored as exact sympy numbers so expected
probabilities are checked on the rational path; floats are derived on demand.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any
from typing import Literal
from typing import TypeVar

import numpy as np
import sympy as sp

from ._constants import ALLOWED_PROBABILITY_FLOOR
from ._constants import FORBIDDEN_GAIN_TOL
from ._constants import FORCED_ZERO_FRACTION
from ._constants import FORCED_ZERO_REJECT
from ._constants import ZERO_PROBABILITY_TOL
from ._errors import DomainError
from ._errors import UnknownScenarioError
from .engine import GainReport
from .engine import OutcomeConstraint
from .engine import Verdict
from .engine import constrained_final
from .engine import hardy_ratio
from .engine import max_gain
from .fields import GainSchedule
from .quantum import Analyzer
from .quantum import MeasurementSetting
from .quantum import TwoQubitState
from .quantum import analyzer
from .quantum import compensated_setting
from .quantum import exact_joint_probability
from .quantum import is_forbidden
from .quantum import joint_amplitude
from .quantum import orthogonal_analyzer

__all__ = [
    "Outcome",
    "Scenario",
    "OutcomeCheck",
    "VerificationRecord",
    "SweepRow",
    "ScanCase",
    "ScanSummary",
    "PhaseCheckSummary",
    "BUILTIN_NAMES",
    "builtin",
    "run_scenario",
    "sweep_angle",
    "random_scan",
    "phase_plate_check",
    "outcome_ratio",
]

logger = logging.getLogger(__name__)

_T = TypeVar("_T")
_R = TypeVar("_R")

ExactAnalyzer = tuple[sp.Expr, sp.Expr]
ScanStatus = Literal["agree", "disagree", "indeterminate"]


def _numeric(pair: ExactAnalyzer) -> Analyzer:
    return complex(sp.N(pair[0], 30)), complex(sp.N(pair[1], 30))


def _verdict_for(probability: sp.Expr) -> Verdict:
    return "classically-forbidden" if probability == 0 else "classically-allowed"


@dataclasses.dataclass(frozen=True, slots=True)
class Outcome:
    """
    One joint detector outcome.

    Args:
        label: Ket label, e.g. "+-'"
        wing1: Exact analyzer (c, d) on photon 1
        wing2: Exact analyzer (f, g) on photon 2
        orthogonal: Per wing, whether the analyzer is the reflected beamsplitter
            channel (sin b, -cos b) rather than the transmitted (cos b, sin b)
        expected_probability: Exact quantum probability
    """

    label: str
    wing1: ExactAnalyzer
    wing2: ExactAnalyzer
    orthogonal: tuple[bool, bool]
    expected_probability: sp.Expr

    @property
    def expected_verdict(self) -> Verdict:
        return _verdict_for(self.expected_probability)

    def setting(self) -> MeasurementSetting:
        return MeasurementSetting.from_analyzers(
            _numeric(self.wing1), _numeric(self.wing2)
        )

    def constraint(self) -> OutcomeConstraint:
        return OutcomeConstraint.from_setting(self.setting())


@dataclasses.dataclass(frozen=True, slots=True)
class Scenario:
    """
    A prepared state with the outcomes of interest.

    The classical gain recipe is (a eps, b eps) with the source plate at delta,
    so every scenario shares one code path; the overall eps scale is a
    convention.
    """

    name: str
    a: sp.Expr
    b: sp.Expr
    delta: sp.Expr
    outcomes: tuple[Outcome, ...]
    description: str = ""

    def __post_init__(self) -> None:
        total = sum((o.expected_probability for o in self.outcomes), sp.Integer(0))
        if sp.simplify(total - 1) > 0:
            raise DomainError(f"{self.name}: expected probabilities sum to {total} > 1")

    @property
    def state(self) -> TwoQubitState:
        return TwoQubitState(float(self.a), float(self.b), float(self.delta))

    def schedule(self, eps: float) -> GainSchedule:
        a, b, delta = float(self.a), float(self.b), float(self.delta)
        return GainSchedule.from_state(a, b, eps, delta)

    def outcome(self, label: str) -> Outcome:
        for candidate in self.outcomes:
            if candidate.label == label:
                return candidate
        raise DomainError(f"{self.name} has no outcome {label!r}")

    def forbidden_outcomes(self) -> tuple[Outcome, ...]:
        return tuple(
            o for o in self.outcomes if o.expected_verdict == "classically-forbidden"
        )

    def recomputed_probability(self, outcome: Outcome) -> sp.Expr:
        """Exact probability recomputed from the state and analyzers."""
        c, d = outcome.wing1
        f, g = outcome.wing2
        return exact_joint_probability(self.a, self.b, self.delta, c, d, f, g)


_HALF = sp.sqrt(2) / 2
_PLUS: ExactAnalyzer = (_HALF, _HALF)
_MINUS: ExactAnalyzer = (_HALF, -_HALF)
_PLUS_PRIME: ExactAnalyzer = (sp.Rational(4, 5), sp.Rational(3, 5))
_MINUS_PRIME: ExactAnalyzer = (sp.Rational(3, 5), -sp.Rational(4, 5))
_CHI: ExactAnalyzer = (16 / sp.sqrt(337), -9 / sp.sqrt(337))
_PHI: ExactAnalyzer = (sp.Rational(3, 5), sp.Rational(4, 5))


def _diagonal_outcomes(table: Sequence[sp.Expr]) -> tuple[Outcome, ...]:
    p_pp, p_pm, p_mp, p_mm = table
    return (
        Outcome("++", _PLUS, _PLUS, (False, False), p_pp),
        Outcome("+-", _PLUS, _MINUS, (False, True), p_pm),
        Outcome("-+", _MINUS, _PLUS, (True, False), p_mp),
        Outcome("--", _MINUS, _MINUS, (True, True), p_mm),
    )


def _max_entangled_diagonal() -> Scenario:
    return Scenario(
        name="max-entangled-diagonal",
        a=_HALF,
        b=_HALF,
        delta=sp.Integer(0),
        outcomes=_diagonal_outcomes(
            (sp.Rational(1, 2), sp.Integer(0), sp.Integer(0), sp.Rational(1, 2))
        ),
        description="(|HV>+|VH>)/sqrt2, both wings in the diagonal basis",
    )


def _partial_3_4_5() -> Scenario:
    return Scenario(
        name="partial-3-4-5",
        a=sp.Rational(3, 5),
        b=sp.Rational(4, 5),
        delta=sp.Integer(0),
        outcomes=(
            Outcome("++'", _PLUS, _PLUS_PRIME, (False, False), sp.Rational(1, 2)),
            Outcome("+-'", _PLUS, _MINUS_PRIME, (False, True), sp.Integer(0)),
            Outcome("-+'", _MINUS, _PLUS_PRIME, (True, False), sp.Rational(49, 1250)),
            Outcome("--'", _MINUS, _MINUS_PRIME, (True, True), sp.Rational(576, 1250)),
        ),
        description="3/5|HV>+4/5|VH>, photon 2 in the 4/5-3/5 basis",
    )


def _hardy() -> Scenario:
    return Scenario(
        name="hardy",
        a=sp.Rational(3, 5),
        b=sp.Rational(4, 5),
        delta=sp.Integer(0),
        outcomes=(
            Outcome("+-'", _PLUS, _MINUS_PRIME, (False, True), sp.Integer(0)),
            Outcome("chi+'", _CHI, _PLUS_PRIME, (True, False), sp.Integer(0)),
            Outcome("-phi", _MINUS, _PHI, (True, False), sp.Integer(0)),
        ),
        description="Hardy's three zero-probability outcomes",
    )


def _cascade_singlet() -> Scenario:
    return Scenario(
        name="cascade-singlet",
        a=_HALF,
        b=_HALF,
        delta=sp.pi,
        outcomes=_diagonal_outcomes(
            (sp.Integer(0), sp.Rational(1, 2), sp.Rational(1, 2), sp.Integer(0))
        ),
        description="(|HV>-|VH>)/sqrt2 realized by a pi phase plate on mode 3",
    )


_BUILTINS: dict[str, Callable[[], Scenario]] = {
    "max-entangled-diagonal": _max_entangled_diagonal,
    "partial-3-4-5": _partial_3_4_5,
    "hardy": _hardy,
    "cascade-singlet": _cascade_singlet,
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> Scenario:
    """
    Return a fully populated builtin scenario.

    Raises:
        UnknownScenarioError: When the name is not a builtin
    """
    try:
        factory = _BUILTINS[name]
    except KeyError as err:
        raise UnknownScenarioError(name) from err

    return factory()


def outcome_ratio(outcome: Outcome) -> complex:
    """A3f' A4f / (A1f A2f) for the outcome's constrained finals (u = v = 1)."""
    return hardy_ratio(constrained_final(1.0, 1.0, outcome.constraint()))


def _map_ordered(
    func: Callable[[_T], _R],
    items: Iterable[_T],
    threads: int,
) -> list[_R]:
    """Map preserving input order; results never depend on the thread count."""
    if threads <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


@dataclasses.dataclass(frozen=True, slots=True)
class OutcomeCheck:
    label: str
    prob: float
    lambda_max: float
    verdict: Verdict
    expected_verdict: Verdict
    agree: bool
    report: GainReport = dataclasses.field(repr=False, compare=False)

    def asdict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "prob": self.prob,
            "lambda_max": self.lambda_max,
            "verdict": self.verdict,
            "agree": self.agree,
        }


@dataclasses.dataclass(frozen=True, slots=True)
class VerificationRecord:
    scenario: str
    eps: float
    outcomes: tuple[OutcomeCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.agree for check in self.outcomes)

    def asdict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "eps": self.eps,
            "outcomes": [check.asdict() for check in self.outcomes],
        }


def run_scenario(
    s: Scenario,
    eps: float,
    *,
    gain_tol: float = FORBIDDEN_GAIN_TOL,
    zero_tol: float = ZERO_PROBABILITY_TOL,
) -> VerificationRecord:
    """
    Compare quantum probability and classical maximum gain for every outcome.

    An outcome agrees when both the quantum zero test and the classical verdict
    match the stored expectation.

    Raises:
        DomainError: When eps is not positive (no pump, every gain is zero)
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive: {eps}")

    state = s.state
    sched = s.schedule(eps)
    checks = []

    for outcome in s.outcomes:
        setting = outcome.setting()
        prob = abs(joint_amplitude(state, setting)) ** 2
        report = max_gain(OutcomeConstraint.from_setting(setting), sched, tol=gain_tol)
        quantum = (
            "classically-forbidden"
            if is_forbidden(state, setting, zero_tol)
            else "classically-allowed"
        )
        agree = report.verdict == outcome.expected_verdict == quantum

        if outcome.expected_verdict == "classically-forbidden" and not agree:
            logger.warning(
                "%s %s: forbidden outcome has lambda_max=%.3e at eps=%g",
                s.name,
                outcome.label,
                report.lambda_max,
                eps,
            )

        checks.append(
            OutcomeCheck(
                label=outcome.label,
                prob=prob,
                lambda_max=report.lambda_max,
                verdict=report.verdict,
                expected_verdict=outcome.expected_verdict,
                agree=agree,
                report=report,
            )
        )

    return VerificationRecord(s.name, eps, tuple(checks))


@dataclasses.dataclass(frozen=True, slots=True)
class SweepRow:
    beta: float
    prob: float
    lambda_max: float

    def asdict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


def sweep_angle(
    s: Scenario,
    which_wing: Literal[1, 2],
    beta_grid: Sequence[float],
    eps: float,
    *,
    label: str | None = None,
    threads: int = 1,
) -> list[SweepRow]:
    """
    Rotate one wing's polarizing beamsplitter through beta_grid.

    The swept outcome defaults to the scenario's first forbidden outcome. Its
    analyzer on the chosen wing becomes the same beamsplitter channel at
    angle beta; the other wing is left alone.
    """
    if not beta_grid:
        raise DomainError("beta_grid is empty")
    if which_wing not in (1, 2):
        raise DomainError(f"which_wing must be 1 or 2: {which_wing}")
    if not eps > 0:
        raise DomainError(f"eps must be positive: {eps}")

    if label is None:
        forbidden = s.forbidden_outcomes()
        if not forbidden:
            raise DomainError(f"{s.name} has no forbidden outcome to sweep")
        outcome = forbidden[0]
    else:
        outcome = s.outcome(label)

    state = s.state
    sched = s.schedule(eps)
    nominal = outcome.setting()
    channel = orthogonal_analyzer if outcome.orthogonal[which_wing - 1] else analyzer

    def row(beta: float) -> SweepRow:
        if which_wing == 1:
            setting = MeasurementSetting.from_analyzers(channel(beta), nominal.wing2)
        else:
            setting = MeasurementSetting.from_analyzers(nominal.wing1, channel(beta))
        prob = abs(joint_amplitude(state, setting)) ** 2
        lambda_max = max_gain(OutcomeConstraint.from_setting(setting), sched).lambda_max
        return SweepRow(float(beta), prob, lambda_max)

    return _map_ordered(row, list(beta_grid), threads)


@dataclasses.dataclass(frozen=True, slots=True)
class ScanCase:
    index: int
    forced_zero: bool
    a: float
    b: float
    prob: float
    lambda_max: float
    status: ScanStatus

    def asdict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True, slots=True)
class ScanSummary:
    """
    Outcome of a random correspondence scan.

    Margins are None when no case of that kind occurred.

    Args:
        worst_forbidden_margin: Largest lambda_max over quantum-forbidden cases
        worst_allowed_margin: Smallest lambda_max over quantum-allowed cases
        max_forced_lambda: Largest lambda_max over the forced exact zeros
    """

    n: int
    eps: float
    rng_seed: int
    forced_zeros: int
    agreements: int
    disagreements: int
    indeterminate: int
    worst_forbidden_margin: float | None
    worst_allowed_margin: float | None
    max_forced_lambda: float | None
    cases: tuple[ScanCase, ...] = dataclasses.field(repr=False, default=())

    @property
    def passed(self) -> bool:
        return self.disagreements == 0

    def asdict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out.pop("cases")
        return out


def _random_pair(rng: np.random.Generator) -> tuple[complex, complex]:
    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    return complex(x[0], x[1]), complex(x[2], x[3])


def _random_case(
    rng: np.random.Generator,
    forced_zero: bool,
    delta: float = 0.0,
) -> tuple[TwoQubitState, MeasurementSetting]:
    """
    Draw a random state and setting.

    A forced zero solves a c g + b e^{-i delta} d f = 0 for f, then
    renormalizes (f, g); draws with |b d| too small are rejected.
    """
    while True:
        state = TwoQubitState.from_angle(rng.uniform(0.0, math.pi / 2), delta)
        c, d = _random_pair(rng)
        f, g = _random_pair(rng)

        if not forced_zero:
            return state, MeasurementSetting(c, d, f, g)

        if abs(state.b * d) < FORCED_ZERO_REJECT:
            continue

        f = -state.a * c * g * complex(np.exp(1j * delta)) / (state.b * d)
        norm = math.sqrt(abs(f) ** 2 + abs(g) ** 2)
        return state, MeasurementSetting(c, d, f / norm, g / norm)


def _is_forced(index: int) -> bool:
    period = round(1 / FORCED_ZERO_FRACTION)
    return index % period == 0


def random_scan(
    n: int,
    eps: float,
    rng_seed: int,
    *,
    threads: int = 1,
    gain_tol: float = FORBIDDEN_GAIN_TOL,
    zero_tol: float = ZERO_PROBABILITY_TOL,
) -> ScanSummary:
    """
    Check the quantum-zero / classical-no-gain correspondence on random cases.

    Every case draws from its own generator seeded by (rng_seed, index), and
    one case in ten is a forced exact zero, so results are deterministic and
    independent of the thread count. Probabilities between the zero tolerance
    and the allowed floor are reported as indeterminate.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1: {n}")
    if not eps > 0:
        raise DomainError(f"eps must be positive: {eps}")
    if not zero_tol > 0 or gain_tol < 0:
        raise DomainError(f"Invalid tolerances: {zero_tol=}, {gain_tol=}")

    def evaluate(index: int) -> ScanCase:
        rng = np.random.default_rng([rng_seed, index])
        forced = _is_forced(index)
        state, setting = _random_case(rng, forced)
        prob = abs(joint_amplitude(state, setting)) ** 2
        sched = GainSchedule.from_state(state.a, state.b, eps, state.delta)
        lambda_max = max_gain(OutcomeConstraint.from_setting(setting), sched).lambda_max

        status: ScanStatus
        if prob < zero_tol:
            status = "agree" if lambda_max <= gain_tol else "disagree"
        elif prob > ALLOWED_PROBABILITY_FLOOR:
            status = "agree" if lambda_max > gain_tol else "disagree"
        else:
            status = "indeterminate"

        return ScanCase(index, forced, state.a, state.b, prob, lambda_max, status)

    cases = _map_ordered(evaluate, range(n), threads)
    logger.info("Scanned %d random cases at eps=%g", n, eps)

    forbidden = [c.lambda_max for c in cases if c.prob < zero_tol]
    allowed = [c.lambda_max for c in cases if c.prob > ALLOWED_PROBABILITY_FLOOR]
    forced = [c.lambda_max for c in cases if c.forced_zero]

    return ScanSummary(
        n=n,
        eps=eps,
        rng_seed=rng_seed,
        forced_zeros=len(forced),
        agreements=sum(c.status == "agree" for c in cases),
        disagreements=sum(c.status == "disagree" for c in cases),
        indeterminate=sum(c.status == "indeterminate" for c in cases),
        worst_forbidden_margin=max(forbidden) if forbidden else None,
        worst_allowed_margin=min(allowed) if allowed else None,
        max_forced_lambda=max(forced) if forced else None,
        cases=tuple(cases),
    )


@dataclasses.dataclass(frozen=True, slots=True)
class PhaseCheckSummary:
    n: int
    identical: int
    mismatches: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def phase_plate_check(n: int, eps: float, rng_seed: int) -> PhaseCheckSummary:
    """
    Compare verdicts with a source phase plate against its compensated analyzer.

    Each case draws a delta = 0 state and setting (every other one a forced
    zero) and a random delta in (0, 2pi); the plated state measured with the
    compensated setting must get the same quantum and classical verdicts.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1: {n}")

    mismatches = []
    for index in range(n):
        rng = np.random.default_rng([rng_seed, index])
        state, setting = _random_case(rng, forced_zero=index % 2 == 0)
        delta = rng.uniform(0.0, 2 * math.pi)
        plated = dataclasses.replace(state, delta=delta)
        compensated = compensated_setting(setting, delta)

        plain_report = max_gain(
            OutcomeConstraint.from_setting(setting),
            GainSchedule.from_state(state.a, state.b, eps),
        )
        plated_report = max_gain(
            OutcomeConstraint.from_setting(compensated),
            GainSchedule.from_state(state.a, state.b, eps, delta),
        )

        same_quantum = is_forbidden(state, setting) == is_forbidden(plated, compensated)
        if not (same_quantum and plain_report.verdict == plated_report.verdict):
            mismatches.append(index)

    return PhaseCheckSummary(n, n - len(mismatches), tuple(mismatches))

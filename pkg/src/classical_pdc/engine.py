"""
Maximum classical gain over every seed consistent with a measured outcome.

Because inverse_amplify is a bijection, searching all seeds whose amplified
fields match an outcome is the same as searching all final fields that satisfy
the outcome's linear constraints

    d A1f = c A3f'        f A2f = g A4f

(A3f' is mode 3 after the source phase plate). Those finals are parameterized
by two complex numbers (u, v), so I_out - I_in is a real quadratic form in
w = (Re u, Im u, Re v, Im v). Its largest eigenvalue is the maximum gain per
unit output intensity; a joint outcome is classically possible only if that
maximum is positive.
"""

from __future__ import annotations

import cmath
import dataclasses
import itertools
import logging
import math
from collections.abc import Sequence
from typing import Any
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from ._constants import FORBIDDEN_GAIN_TOL
from ._errors import DomainError
from .fields import FieldQuad
from .fields import GainSchedule
from .fields import deamplify_pair
from .fields import intensity
from .fields import inverse_amplify
from .linalg import jacobi_eigh
from .quantum import MeasurementSetting

__all__ = [
    "Verdict",
    "OutcomeConstraint",
    "GainReport",
    "constrained_final",
    "gain_at",
    "gain_form",
    "max_gain",
    "closed_form_lambda",
    "sample_gain",
    "epsilon_slope",
    "hardy_ratio",
]

logger = logging.getLogger(__name__)

Verdict = Literal["classically-forbidden", "classically-allowed"]

_MIN_SLOPE_POINTS = 4
_MIN_SLOPE_DECADES = 2.0


@dataclasses.dataclass(frozen=True, slots=True)
class OutcomeConstraint:
    """Analyzer coefficients of a joint outcome, read as constraints on final fields."""

    c: complex
    d: complex
    f: complex
    g: complex

    def __post_init__(self) -> None:
        # Normalization rules are those of a measurement setting
        setting = MeasurementSetting(self.c, self.d, self.f, self.g)
        for name in ("c", "d", "f", "g"):
            object.__setattr__(self, name, getattr(setting, name))

    @classmethod
    def from_setting(cls, m: MeasurementSetting) -> OutcomeConstraint:
        return cls(m.c, m.d, m.f, m.g)

    def with_phase(self, phase: float) -> OutcomeConstraint:
        z = cmath.exp(1j * phase)
        return OutcomeConstraint(self.c * z, self.d * z, self.f * z, self.g * z)


@dataclasses.dataclass(frozen=True, slots=True)
class GainReport:
    """
    Result of a maximum-gain search.

    Args:
        lambda_max: Maximum of I_out - I_in over unit output intensity
        optimizer: A maximizing final-field configuration (unit intensity)
        seed: Its preimage under inverse_amplify
        i_in: Seed intensity of the optimizer
        i_out: Final intensity of the optimizer (1 up to rounding)
        verdict: Forbidden when lambda_max <= the forbidden-gain tolerance
    """

    lambda_max: float
    optimizer: FieldQuad
    seed: FieldQuad
    i_in: float
    i_out: float
    verdict: Verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda_max": self.lambda_max,
            "optimizer": self.optimizer.asdict(),
            "seed": self.seed.asdict(),
            "i_in": self.i_in,
            "i_out": self.i_out,
            "verdict": self.verdict,
        }


def constrained_final(u: complex, v: complex, oc: OutcomeConstraint) -> FieldQuad:
    """Final fields satisfying both outcome constraints identically."""
    return FieldQuad(oc.c * u, oc.g * v, oc.d * u, oc.f * v, "final")


def gain_at(
    oc: OutcomeConstraint,
    sched: GainSchedule,
    u: complex,
    v: complex,
) -> float:
    """I_out - I_in for one constrained final, by the exact inverse maps."""
    final = constrained_final(u, v, oc)
    return intensity(final) - intensity(inverse_amplify(final, sched))


def _form_value(
    oc: OutcomeConstraint,
    sched: GainSchedule,
    w: NDArray[np.float64],
) -> float:
    return gain_at(oc, sched, complex(w[0], w[1]), complex(w[2], w[3]))


def gain_form(oc: OutcomeConstraint, sched: GainSchedule) -> NDArray[np.float64]:
    """
    Assemble the 4x4 symmetric M with w^T M w = I_out - I_in.

    Entries come from evaluating the exact gain on basis vectors and pairwise
    sums of basis vectors (polarization identity).
    """
    basis = np.eye(4)
    diagonal = [_form_value(oc, sched, basis[i]) for i in range(4)]
    form = np.diag(diagonal)

    for i, j in itertools.combinations(range(4), 2):
        both = _form_value(oc, sched, basis[i] + basis[j])
        form[i, j] = form[j, i] = 0.5 * (both - diagonal[i] - diagonal[j])

    return form


def _verdict(lambda_max: float, tol: float) -> Verdict:
    if lambda_max <= tol:
        return "classically-forbidden"
    return "classically-allowed"


def max_gain(
    oc: OutcomeConstraint,
    sched: GainSchedule,
    *,
    tol: float = FORBIDDEN_GAIN_TOL,
) -> GainReport:
    """
    Maximize classical gain over all seeds producing the constrained outcome.

    The verdict is forbidden when lambda_max <= tol.

    Raises:
        DomainError: When tol is negative
        ConvergenceError: When the eigensolver fails
    """
    if tol < 0:
        raise DomainError(f"tol must be >= 0: {tol}")

    eigenvalues, eigenvectors = jacobi_eigh(gain_form(oc, sched))
    lambda_max = float(eigenvalues[-1])
    w = eigenvectors[:, -1]

    # Fix the eigenvector sign so reports are reproducible
    if w[int(np.argmax(np.abs(w)))] < 0:
        w = -w

    optimizer = constrained_final(complex(w[0], w[1]), complex(w[2], w[3]), oc)
    seed = inverse_amplify(optimizer, sched)

    return GainReport(
        lambda_max=lambda_max,
        optimizer=optimizer,
        seed=seed,
        i_in=intensity(seed),
        i_out=intensity(optimizer),
        verdict=_verdict(lambda_max, tol),
    )


def closed_form_lambda(oc: OutcomeConstraint, sched: GainSchedule) -> float:
    """
    Largest gain from the two-dimensional reduction of the gain form.

    With P_u, P_v the intensity losses per unit |u|^2, |v|^2 and K the cross
    coefficient, lambda = -(P_u + P_v)/2 + sqrt(((P_u - P_v)/2)^2 + |K|^2).
    """
    loss12 = math.cosh(2 * sched.g12) - 1.0
    loss34 = math.cosh(2 * sched.g34) - 1.0
    p_u = abs(oc.c) ** 2 * loss12 + abs(oc.d) ** 2 * loss34
    p_v = abs(oc.g) ** 2 * loss12 + abs(oc.f) ** 2 * loss34
    cross = oc.c * oc.g * math.sinh(2 * sched.g12) + (
        cmath.exp(-1j * sched.delta) * oc.d * oc.f * math.sinh(2 * sched.g34)
    )

    return -0.5 * (p_u + p_v) + math.hypot(0.5 * (p_u - p_v), abs(cross))


def sample_gain(
    oc: OutcomeConstraint,
    sched: GainSchedule,
    n: int,
    rng_seed: int,
) -> float:
    """
    Brute-force maximum of I_out - I_in over n random unit vectors w.

    Evaluates the closed-form inverse maps directly on each sample and never
    touches the assembled matrix.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1: {n}")

    rng = np.random.default_rng(rng_seed)
    w = rng.standard_normal((n, 4))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    u = w[:, 0] + 1j * w[:, 1]
    v = w[:, 2] + 1j * w[:, 3]

    a1, a2 = oc.c * u, oc.g * v
    a3, a4 = oc.d * u, oc.f * v
    i_out = np.abs(a1) ** 2 + np.abs(a2) ** 2 + np.abs(a3) ** 2 + np.abs(a4) ** 2

    s1, s2 = deamplify_pair(a1, a2, sched.g12)
    s3, s4 = deamplify_pair(a3 * cmath.exp(-1j * sched.delta), a4, sched.g34)
    i_in = np.abs(s1) ** 2 + np.abs(s2) ** 2 + np.abs(s3) ** 2 + np.abs(s4) ** 2

    return float(np.max(i_out - i_in))


def epsilon_slope(
    oc: OutcomeConstraint,
    a: float,
    b: float,
    eps_grid: Sequence[float],
    delta: float = 0.0,
) -> float:
    """
    Least-squares slope of log|lambda_max| against log eps, gains (a eps, b eps).

    Allowed outcomes scale with slope 1, forbidden outcomes with slope 2. Grid
    points where lambda_max is exactly zero are dropped with a warning.

    Raises:
        DomainError: When the grid is too short, too narrow or not positive
    """
    grid = np.asarray(eps_grid, dtype=np.float64)
    if grid.size < _MIN_SLOPE_POINTS or np.any(grid <= 0):
        raise DomainError(f"Need >= {_MIN_SLOPE_POINTS} positive grid points")
    if math.log10(grid.max() / grid.min()) < _MIN_SLOPE_DECADES:
        raise DomainError(f"Grid must span >= {_MIN_SLOPE_DECADES} decades")

    log_eps = []
    log_lambda = []
    for eps in grid:
        lambda_max = max_gain(oc, GainSchedule.from_state(a, b, eps, delta)).lambda_max
        if lambda_max == 0.0:
            logger.warning("lambda_max is exactly 0 at eps=%r, point excluded", eps)
            continue
        log_eps.append(math.log(eps))
        log_lambda.append(math.log(abs(lambda_max)))

    if len(log_eps) < 2:
        raise DomainError("Fewer than two usable grid points remain")

    slope, _ = np.polyfit(log_eps, log_lambda, 1)
    return float(slope)


def hardy_ratio(final: FieldQuad) -> complex:
    """A3f' A4f / (A1f A2f); set by the outcome alone for any constrained final."""
    return final.a3 * final.a4 / (final.a1 * final.a2)

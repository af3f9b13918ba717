"""
Reference quantum calculator for two-photon polarization states.

States are in Schmidt form a|HV> + b e^{i delta}|VH> and outcomes are analyzer
states c|H> + d|V> (photon 1) and f|H> + g|V> (photon 2). The joint amplitude is

    a c g + b e^{-i delta} d f

whose modulus is that of <phi chi|psi>. The e^{-i delta} sign matches the
mode-3 phase plate of the classical model, so an analyzer phase d -> d e^{i delta}
compensates a source plate of angle delta.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import sympy as sp

from ._constants import EXACTNESS_TOL
from ._constants import ZERO_PROBABILITY_TOL
from ._errors import DomainError

__all__ = [
    "Analyzer",
    "TwoQubitState",
    "MeasurementSetting",
    "analyzer",
    "orthogonal_analyzer",
    "diagonal_basis",
    "joint_amplitude",
    "probability_table",
    "is_forbidden",
    "compensated_setting",
    "exact_joint_probability",
    "exact_probability_table",
]

# Coefficients (x, y) of the single-photon state x|H> + y|V>
Analyzer = tuple[complex, complex]

ProbabilityTable = tuple[tuple[float, float], tuple[float, float]]

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _check_unit(x: complex, y: complex, what: str) -> None:
    if not (cmath.isfinite(x) and cmath.isfinite(y)):
        raise DomainError(f"Non-finite {what}: ({x}, {y})")
    norm = abs(x) ** 2 + abs(y) ** 2
    if abs(norm - 1.0) > EXACTNESS_TOL:
        raise DomainError(f"{what} is not normalized: |x|^2+|y|^2 = {norm!r}")


@dataclasses.dataclass(frozen=True, slots=True)
class TwoQubitState:
    """The Schmidt-form state a|HV> + b e^{i delta}|VH>."""

    a: float
    b: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise DomainError(f"Schmidt coefficients must be >= 0: {self.a}, {self.b}")
        _check_unit(self.a, self.b, "state")

    @classmethod
    def from_angle(cls, theta: float, delta: float = 0.0) -> TwoQubitState:
        """a = cos(theta), b = sin(theta) for theta in [0, pi/2]."""
        return cls(math.cos(theta), math.sin(theta), delta)


@dataclasses.dataclass(frozen=True, slots=True)
class MeasurementSetting:
    """Analyzer states for both wings: c|H>+d|V> on photon 1, f|H>+g|V> on photon 2."""

    c: complex
    d: complex
    f: complex
    g: complex

    def __post_init__(self) -> None:
        for name in ("c", "d", "f", "g"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _check_unit(self.c, self.d, "wing 1 analyzer")
        _check_unit(self.f, self.g, "wing 2 analyzer")

    @classmethod
    def from_analyzers(cls, wing1: Analyzer, wing2: Analyzer) -> MeasurementSetting:
        return cls(wing1[0], wing1[1], wing2[0], wing2[1])

    @property
    def wing1(self) -> Analyzer:
        return self.c, self.d

    @property
    def wing2(self) -> Analyzer:
        return self.f, self.g

    def with_phase(self, phase: float) -> MeasurementSetting:
        """Same setting with every coefficient multiplied by a common phase."""
        z = cmath.exp(1j * phase)
        return MeasurementSetting(self.c * z, self.d * z, self.f * z, self.g * z)


def analyzer(beta: float) -> Analyzer:
    """Transmitted channel of a polarizing beamsplitter rotated to angle beta."""
    return math.cos(beta), math.sin(beta)


def orthogonal_analyzer(beta: float) -> Analyzer:
    """Reflected channel of the same beamsplitter."""
    return math.sin(beta), -math.cos(beta)


def diagonal_basis() -> tuple[Analyzer, Analyzer]:
    """The |+>, |-> basis."""
    return (_INV_SQRT2, _INV_SQRT2), (_INV_SQRT2, -_INV_SQRT2)


def joint_amplitude(state: TwoQubitState, m: MeasurementSetting) -> complex:
    return state.a * m.c * m.g + state.b * cmath.exp(-1j * state.delta) * m.d * m.f


def _check_basis(basis: tuple[Analyzer, Analyzer]) -> None:
    first, second = basis
    _check_unit(*first, "basis vector")
    _check_unit(*second, "basis vector")
    overlap = first[0].conjugate() * second[0] + first[1].conjugate() * second[1]
    if abs(overlap) > EXACTNESS_TOL:
        raise DomainError(f"Basis is not orthogonal: overlap {overlap!r}")


def probability_table(
    state: TwoQubitState,
    basis1: tuple[Analyzer, Analyzer],
    basis2: tuple[Analyzer, Analyzer],
) -> ProbabilityTable:
    """
    Joint outcome probabilities; entry [i][j] is basis1[i] on photon 1, basis2[j] on 2.

    Raises:
        DomainError: When either basis is not orthonormal
    """
    _check_basis(basis1)
    _check_basis(basis2)

    def prob(i: int, j: int) -> float:
        setting = MeasurementSetting.from_analyzers(basis1[i], basis2[j])
        return abs(joint_amplitude(state, setting)) ** 2

    return (prob(0, 0), prob(0, 1)), (prob(1, 0), prob(1, 1))


def is_forbidden(
    state: TwoQubitState,
    m: MeasurementSetting,
    tol: float = ZERO_PROBABILITY_TOL,
) -> bool:
    """True when quantum mechanics assigns the joint outcome probability below tol."""
    if tol <= 0:
        raise DomainError(f"tol must be positive: {tol}")

    return abs(joint_amplitude(state, m)) ** 2 < tol


def compensated_setting(m: MeasurementSetting, delta: float) -> MeasurementSetting:
    """Add the analyzer phase plate that cancels a source plate of angle delta."""
    return dataclasses.replace(m, d=m.d * cmath.exp(1j * delta))


def exact_joint_probability(
    a: sp.Expr,
    b: sp.Expr,
    delta: sp.Expr,
    c: sp.Expr,
    d: sp.Expr,
    f: sp.Expr,
    g: sp.Expr,
) -> sp.Expr:
    """Joint probability on exact sympy numbers (rationals, radicals, pi multiples)."""
    amplitude = a * c * g + b * sp.exp(-sp.I * delta) * d * f
    return sp.simplify(sp.expand(amplitude * sp.conjugate(amplitude)))


def exact_probability_table(
    state: tuple[sp.Expr, sp.Expr, sp.Expr],
    basis1: tuple[tuple[sp.Expr, sp.Expr], tuple[sp.Expr, sp.Expr]],
    basis2: tuple[tuple[sp.Expr, sp.Expr], tuple[sp.Expr, sp.Expr]],
) -> tuple[tuple[sp.Expr, sp.Expr], tuple[sp.Expr, sp.Expr]]:
    """The rational path of probability_table; state is (a, b, delta)."""
    a, b, delta = state

    def prob(i: int, j: int) -> sp.Expr:
        c, d = basis1[i]
        f, g = basis2[j]
        return exact_joint_probability(a, b, delta, c, d, f, g)

    return (prob(0, 0), prob(0, 1)), (prob(1, 0), prob(1, 1))

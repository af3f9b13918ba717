"""
Mode amplitudes and the closed-form parametric amplification maps.

Mode convention, used everywhere in the package:

    mode 1: H polarized along k1      mode 3: V polarized along k1
    mode 2: V polarized along k2      mode 4: H polarized along k2

Modes (1, 2) form one phase-matched pair and (3, 4) the other. Amplitudes are
scaled (A = E / sqrt(omega)) so |A|^2 is the classical "intensity" and the
Manley-Rowe relations become equal intensity gain within each pair. The pump
amplitude and coupling are folded into the gain exponents; the four PDC phases
are fixed at zero.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from typing import Literal
from typing import TypeVar

import numpy as np
from numpy.typing import NDArray

from ._errors import DomainError

__all__ = [
    "ComplexAmp",
    "FieldQuad",
    "GainSchedule",
    "amplify_pair",
    "deamplify_pair",
    "apply_phase_plate",
    "forward_amplify",
    "inverse_amplify",
    "pair_gain",
    "intensity",
    "pair_intensities",
]

# A scaled mode amplitude; re/im are the real and imaginary parts of A = E/sqrt(w)
ComplexAmp = complex

Stage = Literal["seed", "final"]

_TWO_PI = 2.0 * math.pi

_Amp = TypeVar("_Amp", complex, NDArray[np.complex128])


@dataclasses.dataclass(frozen=True, slots=True)
class FieldQuad:
    """The four scaled mode amplitudes at one time slice."""

    a1: ComplexAmp
    a2: ComplexAmp
    a3: ComplexAmp
    a4: ComplexAmp
    stage: Stage = "seed"

    def __post_init__(self) -> None:
        if self.stage not in ("seed", "final"):
            raise DomainError(f"Unknown stage: {self.stage}")

        for name in ("a1", "a2", "a3", "a4"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise DomainError(f"Non-finite amplitude {name}={value}")
            object.__setattr__(self, name, value)

    @classmethod
    def zeros(cls, stage: Stage = "seed") -> FieldQuad:
        return cls(0j, 0j, 0j, 0j, stage)

    @classmethod
    def from_array(cls, values: NDArray[np.complex128], stage: Stage) -> FieldQuad:
        """Build from a length-4 complex array ordered (a1, a2, a3, a4)."""
        if np.shape(values) != (4,):
            raise DomainError(f"Expected 4 amplitudes, got shape {np.shape(values)}")
        a1, a2, a3, a4 = (complex(v) for v in values)
        return cls(a1, a2, a3, a4, stage)

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.a1, self.a2, self.a3, self.a4], dtype=np.complex128)

    def scaled(self, factor: complex) -> FieldQuad:
        """Multiply every amplitude by a common factor, keeping the stage."""
        return FieldQuad.from_array(self.as_array() * factor, self.stage)

    def asdict(self) -> dict[str, str | list[float]]:
        """JSON-ready mapping; complex amplitudes become [re, im] pairs."""
        out: dict[str, str | list[float]] = {"stage": self.stage}
        for name in ("a1", "a2", "a3", "a4"):
            value: complex = getattr(self, name)
            out[name] = [value.real, value.imag]
        return out


@dataclasses.dataclass(frozen=True, slots=True)
class GainSchedule:
    """
    Gain exponents for the two phase-matched pairs plus the source phase plate.

    Args:
        g12: Gain exponent (alpha * T) of the mode 1-2 pair
        g34: Gain exponent of the mode 3-4 pair
        delta: Phase plate angle (radians) applied to mode 3 after amplification.
            Stored reduced to [0, 2pi).
    """

    g12: float
    g34: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("g12", "g34", "delta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"Non-finite schedule value {name}={value}")
            object.__setattr__(self, name, value)

        if self.g12 < 0 or self.g34 < 0:
            raise DomainError(f"Gain exponents must be >= 0: {self.g12}, {self.g34}")

        # Tiny negative angles wrap to exactly 2pi in floating point
        delta = self.delta % _TWO_PI
        object.__setattr__(self, "delta", 0.0 if delta == _TWO_PI else delta)

    @classmethod
    def from_state(
        cls,
        a: float,
        b: float,
        eps: float,
        delta: float = 0.0,
    ) -> GainSchedule:
        """Classical stand-in for a|HV> + b e^{i delta}|VH>: gains (a eps, b eps)."""
        return cls(a * eps, b * eps, delta)


def amplify_pair(x: _Amp, y: _Amp, gain: float) -> tuple[_Amp, _Amp]:
    """Closed-form undepleted-pump amplification of one mode pair. Accepts arrays."""
    c = math.cosh(gain)
    s = math.sinh(gain)
    return x * c + 1j * np.conj(y) * s, y * c + 1j * np.conj(x) * s


def deamplify_pair(x: _Amp, y: _Amp, gain: float) -> tuple[_Amp, _Amp]:
    """Exact inverse of amplify_pair. Accepts arrays."""
    c = math.cosh(gain)
    s = math.sinh(gain)
    return x * c - 1j * np.conj(y) * s, y * c - 1j * np.conj(x) * s


def apply_phase_plate(quad: FieldQuad, angle: float) -> FieldQuad:
    """Delay mode 3 (only) by the given angle."""
    return dataclasses.replace(quad, a3=quad.a3 * cmath.exp(1j * angle))


def forward_amplify(seed: FieldQuad, sched: GainSchedule) -> FieldQuad:
    """
    Amplify both pairs from seed values, then apply the mode-3 phase plate.

    Raises:
        DomainError: When the quad is not a seed
    """
    if seed.stage != "seed":
        raise DomainError(f"forward_amplify expects a seed quad, got {seed.stage}")

    a1, a2 = amplify_pair(seed.a1, seed.a2, sched.g12)
    a3, a4 = amplify_pair(seed.a3, seed.a4, sched.g34)

    return apply_phase_plate(FieldQuad(a1, a2, a3, a4, "final"), sched.delta)


def inverse_amplify(final: FieldQuad, sched: GainSchedule) -> FieldQuad:
    """
    Recover the unique seed quad: undo the phase plate, then invert each pair.

    Raises:
        DomainError: When the quad is not a final
    """
    if final.stage != "final":
        raise DomainError(f"inverse_amplify expects a final quad, got {final.stage}")

    unplated = apply_phase_plate(final, -sched.delta)
    a1, a2 = deamplify_pair(unplated.a1, unplated.a2, sched.g12)
    a3, a4 = deamplify_pair(unplated.a3, unplated.a4, sched.g34)

    return FieldQuad(a1, a2, a3, a4, "seed")


def pair_gain(seed: FieldQuad, final: FieldQuad) -> tuple[float, float]:
    """
    Return intensity gain of mode 1 and of mode 3.

    Manley-Rowe makes mode 2 gain equal to mode 1 and mode 4 equal to mode 3,
    so the two numbers characterize all four modes.
    """
    if seed.stage != "seed" or final.stage != "final":
        raise DomainError(f"Stage mismatch: {seed.stage} -> {final.stage}")

    return (
        abs(final.a1) ** 2 - abs(seed.a1) ** 2,
        abs(final.a3) ** 2 - abs(seed.a3) ** 2,
    )


def intensity(quad: FieldQuad) -> float:
    return abs(quad.a1) ** 2 + abs(quad.a2) ** 2 + abs(quad.a3) ** 2 + abs(quad.a4) ** 2


def pair_intensities(quad: FieldQuad) -> tuple[float, float]:
    """Intensity carried by the (1, 2) pair and by the (3, 4) pair."""
    return (
        abs(quad.a1) ** 2 + abs(quad.a2) ** 2,
        abs(quad.a3) ** 2 + abs(quad.a4) ** 2,
    )

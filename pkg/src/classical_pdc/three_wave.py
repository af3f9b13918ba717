"""
Full three-wave mixing with pump depletion, integrated by fixed-step RK4.

    dE0/dt = i gamma w0 E1 E2
    dE1/dt = i gamma w1 E0 E2*
    dE2/dt = i gamma w2 E0 E1*

Used to validate the closed-form amplification maps and the Manley-Rowe
conservation laws. The pump envelope E0 is conventionally started real and
positive; the undepleted-pump gain exponent is then gamma sqrt(w1 w2) |E0| t.
"""

from __future__ import annotations

import cmath
import dataclasses
import logging
import math
from collections.abc import Sequence

from ._constants import ODE_MAX_STEPS
from ._constants import ODE_SNAPSHOT_STRIDE
from ._errors import DomainError
from ._errors import ResourceLimitError

__all__ = [
    "ThreeWaveState",
    "Trajectory",
    "integrate",
    "manley_rowe_residual",
    "energy_residual",
    "undepleted_gain",
]

logger = logging.getLogger(__name__)

_PHASE_MATCH_RTOL = 1e-12


@dataclasses.dataclass(frozen=True, slots=True)
class ThreeWaveState:
    """Unscaled envelopes of pump (0) and the two generated waves (1, 2)."""

    e0: complex
    e1: complex
    e2: complex
    w0: float
    w1: float
    w2: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("e0", "e1", "e2"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise DomainError(f"Non-finite envelope {name}={value}")
            object.__setattr__(self, name, value)

        if min(self.w0, self.w1, self.w2) <= 0 or self.gamma <= 0:
            raise DomainError("Frequencies and coupling must be positive")

        if abs(self.w0 - (self.w1 + self.w2)) > _PHASE_MATCH_RTOL * self.w0:
            raise DomainError(f"Not phase matched: {self.w0} != {self.w1} + {self.w2}")

    @classmethod
    def phase_matched(
        cls,
        e0: complex,
        e1: complex,
        e2: complex,
        w1: float,
        w2: float,
        gamma: float,
    ) -> ThreeWaveState:
        """Build a state with w0 = w1 + w2."""
        return cls(e0, e1, e2, w1 + w2, w1, w2, gamma)

    def with_envelopes(self, e0: complex, e1: complex, e2: complex) -> ThreeWaveState:
        return dataclasses.replace(self, e0=e0, e1=e1, e2=e2)

    def conjugated(self) -> ThreeWaveState:
        """Complex conjugate of every envelope; the time-reversal partner."""
        return self.with_envelopes(
            self.e0.conjugate(),
            self.e1.conjugate(),
            self.e2.conjugate(),
        )

    def scaled(self) -> tuple[complex, complex, complex]:
        """Scaled amplitudes A_i = E_i / sqrt(w_i)."""
        return (
            self.e0 / math.sqrt(self.w0),
            self.e1 / math.sqrt(self.w1),
            self.e2 / math.sqrt(self.w2),
        )

    def manley_rowe(self) -> tuple[float, float, float]:
        """The three Manley-Rowe invariants of this snapshot."""
        n0 = abs(self.e0) ** 2 / self.w0
        n1 = abs(self.e1) ** 2 / self.w1
        n2 = abs(self.e2) ** 2 / self.w2
        return n1 - n2, n0 + n1, n0 + n2

    def energy(self) -> float:
        return abs(self.e0) ** 2 + abs(self.e1) ** 2 + abs(self.e2) ** 2


@dataclasses.dataclass(frozen=True, slots=True)
class Trajectory:
    """
    Sampled integration result.

    Args:
        times: Snapshot times in seconds, strictly increasing
        states: Snapshot at each time
        dt: Step actually taken (t_end divided evenly)
        steps: Number of RK4 steps taken
        stride: Steps between snapshots
    """

    times: tuple[float, ...]
    states: tuple[ThreeWaveState, ...]
    dt: float
    steps: int
    stride: int

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states):
            raise DomainError("times and states must have equal length")

        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise DomainError("Trajectory times must be strictly increasing")

    @property
    def final(self) -> ThreeWaveState:
        return self.states[-1]

    def to_rows(self) -> list[dict[str, float]]:
        """One flat row per snapshot for CSV export."""
        rows = []
        for time, state in zip(self.times, self.states):
            mr1, mr2, mr3 = state.manley_rowe()
            rows.append(
                {
                    "t": time,
                    "e0_re": state.e0.real,
                    "e0_im": state.e0.imag,
                    "e1_re": state.e1.real,
                    "e1_im": state.e1.imag,
                    "e2_re": state.e2.real,
                    "e2_im": state.e2.imag,
                    "mr_1": mr1,
                    "mr_2": mr2,
                    "mr_3": mr3,
                }
            )
        return rows


def _derivative(
    e0: complex,
    e1: complex,
    e2: complex,
    state: ThreeWaveState,
) -> tuple[complex, complex, complex]:
    k = 1j * state.gamma
    return (
        k * state.w0 * e1 * e2,
        k * state.w1 * e0 * e2.conjugate(),
        k * state.w2 * e0 * e1.conjugate(),
    )


def integrate(
    init: ThreeWaveState,
    t_end: float,
    dt: float,
    *,
    stride: int = ODE_SNAPSHOT_STRIDE,
    max_steps: int = ODE_MAX_STEPS,
) -> Trajectory:
    """
    Integrate from t=0 to t_end with classical RK4.

    The step is shrunk slightly so a whole number of steps lands on t_end. The
    initial state and the endpoint are always sampled.

    Raises:
        DomainError: When dt, t_end or stride are not positive
        ResourceLimitError: When the step count would exceed max_steps
    """
    if not (dt > 0 and t_end > 0 and stride > 0):
        raise DomainError(f"Need positive values: {dt=}, {t_end=}, {stride=}")

    steps = max(1, math.ceil(t_end / dt - 1e-9))
    if steps > max_steps:
        raise ResourceLimitError(f"{steps} steps requested, limit is {max_steps}")

    h = t_end / steps
    e0, e1, e2 = init.e0, init.e1, init.e2
    times = [0.0]
    states = [init]

    for step in range(1, steps + 1):
        k1 = _derivative(e0, e1, e2, init)
        k2 = _derivative(
            e0 + 0.5 * h * k1[0], e1 + 0.5 * h * k1[1], e2 + 0.5 * h * k1[2], init
        )
        k3 = _derivative(
            e0 + 0.5 * h * k2[0], e1 + 0.5 * h * k2[1], e2 + 0.5 * h * k2[2], init
        )
        k4 = _derivative(e0 + h * k3[0], e1 + h * k3[1], e2 + h * k3[2], init)

        e0 += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        e1 += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        e2 += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])

        if step % stride == 0 or step == steps:
            times.append(step * h)
            states.append(init.with_envelopes(e0, e1, e2))

    logger.debug("Integrated %d RK4 steps (h=%g), %d snapshots", steps, h, len(times))

    return Trajectory(tuple(times), tuple(states), h, steps, stride)


def _drift(series: Sequence[float]) -> float:
    start = series[0]
    worst = max(abs(value - start) for value in series)
    return worst / abs(start) if start != 0 else worst


def manley_rowe_residual(traj: Trajectory) -> tuple[float, float, float]:
    """
    Maximum drift of each Manley-Rowe invariant, relative to its initial value.

    An invariant that starts at exactly zero reports absolute drift.

    Raises:
        DomainError: When the trajectory has no snapshots
    """
    if not traj.states:
        raise DomainError("Empty trajectory")

    invariants = [state.manley_rowe() for state in traj.states]
    first, second, third = zip(*invariants)

    return _drift(first), _drift(second), _drift(third)


def energy_residual(traj: Trajectory) -> float:
    """Relative drift of |E0|^2 + |E1|^2 + |E2|^2, conserved when w0 = w1 + w2."""
    if not traj.states:
        raise DomainError("Empty trajectory")

    return _drift([state.energy() for state in traj.states])


def undepleted_gain(state: ThreeWaveState, t_end: float) -> float:
    """Gain exponent alpha*T the closed forms assume for this state and duration."""
    return state.gamma * math.sqrt(state.w1 * state.w2) * abs(state.e0) * t_end

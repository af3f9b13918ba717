from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from classical_pdc._errors import DomainError
from classical_pdc.fields import FieldQuad
from classical_pdc.fields import GainSchedule
from classical_pdc.fields import amplify_pair
from classical_pdc.fields import apply_phase_plate
from classical_pdc.fields import deamplify_pair
from classical_pdc.fields import forward_amplify
from classical_pdc.fields import intensity
from classical_pdc.fields import inverse_amplify
from classical_pdc.fields import pair_gain
from classical_pdc.fields import pair_intensities

amplitudes = st.complex_numbers(
    max_magnitude=1.0,
    allow_nan=False,
    allow_infinity=False,
)
gains = st.floats(min_value=0.0, max_value=3.0)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)


@st.composite
def seeds(draw: st.DrawFn) -> FieldQuad:
    a1, a2, a3, a4 = (draw(amplitudes) for _ in range(4))
    return FieldQuad(a1, a2, a3, a4)


@st.composite
def schedules(draw: st.DrawFn) -> GainSchedule:
    return GainSchedule(draw(gains), draw(gains), draw(angles))


def assert_quad_close(left: FieldQuad, right: FieldQuad, tol: float = 1e-12) -> None:
    assert left.stage == right.stage
    assert np.allclose(left.as_array(), right.as_array(), rtol=0, atol=tol)


def test_fieldquad_coerces_to_complex() -> None:
    quad = FieldQuad(1, 2.5, 0, -1)  # type: ignore[arg-type]

    assert all(isinstance(v, complex) for v in quad.as_array().tolist())
    assert quad.stage == "seed"


@pytest.mark.parametrize(
    "bad",
    [float("nan"), complex("inf"), complex(0, float("nan"))],
)
def test_fieldquad_rejects_non_finite(bad: complex) -> None:
    with pytest.raises(DomainError):
        FieldQuad(bad, 0j, 0j, 0j)


def test_fieldquad_rejects_unknown_stage() -> None:
    with pytest.raises(DomainError):
        FieldQuad(0j, 0j, 0j, 0j, "middle")  # type: ignore[arg-type]


def test_fieldquad_from_array_shape_checked() -> None:
    with pytest.raises(DomainError):
        FieldQuad.from_array(np.zeros(3, dtype=np.complex128), "seed")


def test_fieldquad_asdict_uses_pairs() -> None:
    quad = FieldQuad(1 + 2j, 0j, -1j, 3, "final")

    result = quad.asdict()

    assert result == {
        "stage": "final",
        "a1": [1.0, 2.0],
        "a2": [0.0, 0.0],
        "a3": [0.0, -1.0],
        "a4": [3.0, 0.0],
    }


def test_intensity_is_sum_of_squares() -> None:
    quad = FieldQuad(3 + 4j, 1j, -2, 0j)

    assert intensity(quad) == 25 + 1 + 4
    assert pair_intensities(quad) == (26.0, 4.0)


def test_schedule_rejects_negative_gain() -> None:
    with pytest.raises(DomainError):
        GainSchedule(-0.1, 0.0)


def test_schedule_rejects_non_finite() -> None:
    with pytest.raises(DomainError):
        GainSchedule(0.1, float("inf"))


@pytest.mark.parametrize(
    ("delta", "expected"),
    [
        (0.0, 0.0),
        (math.pi, math.pi),
        (2 * math.pi, 0.0),
        (-math.pi / 2, 1.5 * math.pi),
        (-1e-17, 0.0),
    ],
)
def test_schedule_reduces_delta(delta: float, expected: float) -> None:
    sched = GainSchedule(0.0, 0.0, delta)

    assert 0.0 <= sched.delta < 2 * math.pi
    assert sched.delta == pytest.approx(expected, abs=1e-15)


def test_schedule_from_state() -> None:
    sched = GainSchedule.from_state(0.6, 0.8, 0.5, math.pi)

    assert sched.g12 == pytest.approx(0.3)
    assert sched.g34 == pytest.approx(0.4)
    assert sched.delta == math.pi


def test_forward_amplify_zero_seed_stays_zero() -> None:
    final = forward_amplify(FieldQuad.zeros(), GainSchedule(2.0, 1.0, 1.0))

    assert final == FieldQuad.zeros("final")


def test_forward_amplify_identity_without_gain() -> None:
    seed = FieldQuad(1 + 1j, -0.5j, 0.3, 0.2 - 0.7j)

    final = forward_amplify(seed, GainSchedule(0.0, 0.0, 0.0))

    assert final.as_array().tolist() == seed.as_array().tolist()
    assert final.stage == "final"


def test_forward_amplify_maximal_gain_phase() -> None:
    seed = FieldQuad(1, 1j, 0j, 0j)

    final = forward_amplify(seed, GainSchedule(math.log(2), 0.0))

    assert final.a1 == pytest.approx(2)
    assert final.a2 == pytest.approx(2j)


def test_forward_amplify_maximal_loss_phase() -> None:
    seed = FieldQuad(1, -1j, 0j, 0j)

    final = forward_amplify(seed, GainSchedule(math.log(2), 0.0))

    assert final.a1 == pytest.approx(0.5)
    assert final.a2 == pytest.approx(-0.5j)


def test_forward_amplify_plates_mode_three_only() -> None:
    seed = FieldQuad(1, 1, 1, 1)

    final = forward_amplify(seed, GainSchedule(0.0, 0.0, math.pi / 2))

    assert final.a3 == pytest.approx(1j)
    assert (final.a1, final.a2, final.a4) == (1, 1, 1)


def test_inverse_amplify_recovers_known_seed() -> None:
    final = FieldQuad(2, 2j, 0j, 0j, "final")

    seed = inverse_amplify(final, GainSchedule(math.log(2), 0.0))

    assert seed.a1 == pytest.approx(1)
    assert seed.a2 == pytest.approx(1j)
    assert seed.stage == "seed"


def test_stage_mismatch_rejected() -> None:
    sched = GainSchedule(0.1, 0.1)

    with pytest.raises(DomainError):
        forward_amplify(FieldQuad.zeros("final"), sched)

    with pytest.raises(DomainError):
        inverse_amplify(FieldQuad.zeros("seed"), sched)

    with pytest.raises(DomainError):
        pair_gain(FieldQuad.zeros("final"), FieldQuad.zeros("final"))


def test_pair_gain_values() -> None:
    seed = FieldQuad(1, 1j, 0j, 0j)
    final = forward_amplify(seed, GainSchedule(math.log(2), 0.0))

    assert pair_gain(FieldQuad.zeros(), FieldQuad.zeros("final")) == (0.0, 0.0)
    assert pair_gain(seed, final) == pytest.approx((3.0, 0.0))


def test_apply_phase_plate_round_trip() -> None:
    quad = FieldQuad(1, 2, 3 + 1j, 4)

    back = apply_phase_plate(apply_phase_plate(quad, 0.7), -0.7)

    assert_quad_close(back, quad, 1e-15)


@given(seeds(), schedules())
def test_roundtrip_is_identity(seed: FieldQuad, sched: GainSchedule) -> None:
    assert_quad_close(inverse_amplify(forward_amplify(seed, sched), sched), seed)


def test_roundtrip_batch_of_random_cases() -> None:
    rng = np.random.default_rng(2024)
    x = rng.uniform(-1, 1, 1000) + 1j * rng.uniform(-1, 1, 1000)
    y = rng.uniform(-1, 1, 1000) + 1j * rng.uniform(-1, 1, 1000)

    for gain in rng.uniform(0, 3, 10):
        fx, fy = amplify_pair(x, y, float(gain))
        bx, by = deamplify_pair(fx, fy, float(gain))

        assert np.max(np.abs(bx - x)) < 1e-12
        assert np.max(np.abs(by - y)) < 1e-12


@given(seeds(), schedules())
def test_manley_rowe_equal_pair_gains(seed: FieldQuad, sched: GainSchedule) -> None:
    final = forward_amplify(seed, sched)

    gain1 = abs(final.a1) ** 2 - abs(seed.a1) ** 2
    gain2 = abs(final.a2) ** 2 - abs(seed.a2) ** 2
    gain3 = abs(final.a3) ** 2 - abs(seed.a3) ** 2
    gain4 = abs(final.a4) ** 2 - abs(seed.a4) ** 2

    assert gain1 == pytest.approx(gain2, abs=1e-12)
    assert gain3 == pytest.approx(gain4, abs=1e-12)


@given(seeds(), schedules(), angles)
def test_phase_covariance_keeps_pair_gains(
    seed: FieldQuad,
    sched: GainSchedule,
    theta: float,
) -> None:
    z = cmath.exp(1j * theta)
    rotated = FieldQuad(seed.a1 * z, seed.a2 / z, seed.a3 * z, seed.a4 / z)

    before = pair_gain(seed, forward_amplify(seed, sched))
    after = pair_gain(rotated, forward_amplify(rotated, sched))

    assert after == pytest.approx(before, abs=1e-11)


@given(seeds(), schedules(), st.floats(min_value=-5.0, max_value=5.0))
def test_homogeneous_in_real_scale(
    seed: FieldQuad,
    sched: GainSchedule,
    k: float,
) -> None:
    final = forward_amplify(seed, sched)
    scaled = forward_amplify(seed.scaled(k), sched)

    assert np.allclose(scaled.as_array(), k * final.as_array(), rtol=1e-12, atol=1e-10)
    expected = k * k * intensity(final)
    assert intensity(scaled) == pytest.approx(expected, rel=1e-9, abs=1e-9)

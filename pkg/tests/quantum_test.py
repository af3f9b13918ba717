from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from classical_pdc._errors import DomainError
from classical_pdc.quantum import MeasurementSetting
from classical_pdc.quantum import TwoQubitState
from classical_pdc.quantum import analyzer
from classical_pdc.quantum import compensated_setting
from classical_pdc.quantum import diagonal_basis
from classical_pdc.quantum import exact_joint_probability
from classical_pdc.quantum import exact_probability_table
from classical_pdc.quantum import is_forbidden
from classical_pdc.quantum import joint_amplitude
from classical_pdc.quantum import orthogonal_analyzer
from classical_pdc.quantum import probability_table

R2 = 1 / math.sqrt(2)
MAX_ENTANGLED = TwoQubitState(R2, R2)
HARDY = TwoQubitState(0.6, 0.8)
CHI = (16 / math.sqrt(337), -9 / math.sqrt(337))
PHI = (0.6, 0.8)
PLUS_PRIME = (0.8, 0.6)
MINUS_PRIME = (0.6, -0.8)
PLUS, MINUS = diagonal_basis()


def random_setting(rng: np.random.Generator) -> MeasurementSetting:
    x = rng.standard_normal(8)
    first = x[:4] / np.linalg.norm(x[:4])
    second = x[4:] / np.linalg.norm(x[4:])
    return MeasurementSetting(
        complex(first[0], first[1]),
        complex(first[2], first[3]),
        complex(second[0], second[1]),
        complex(second[2], second[3]),
    )


def test_state_requires_normalization() -> None:
    with pytest.raises(DomainError):
        TwoQubitState(0.6, 0.7)


def test_state_requires_non_negative_coefficients() -> None:
    with pytest.raises(DomainError):
        TwoQubitState(-0.6, 0.8)


def test_state_from_angle() -> None:
    state = TwoQubitState.from_angle(math.pi / 4, 1.0)

    assert state.a == pytest.approx(R2)
    assert state.b == pytest.approx(R2)
    assert state.delta == 1.0


def test_setting_requires_normalized_wings() -> None:
    with pytest.raises(DomainError):
        MeasurementSetting(1, 1, 1, 0)

    with pytest.raises(DomainError):
        MeasurementSetting(1, 0, 0.5, 0.5)


def test_setting_wings_and_phase() -> None:
    setting = MeasurementSetting.from_analyzers(PLUS, MINUS_PRIME)

    rotated = setting.with_phase(0.3)

    assert setting.wing1 == PLUS
    assert setting.wing2 == MINUS_PRIME
    assert rotated.c == pytest.approx(R2 * cmath.exp(0.3j))


def test_analyzer_channels_are_orthogonal() -> None:
    first = analyzer(0.4)
    second = orthogonal_analyzer(0.4)

    overlap = first[0] * second[0] + first[1] * second[1]

    assert overlap == pytest.approx(0.0, abs=1e-16)
    assert analyzer(math.pi / 4) == pytest.approx(PLUS)
    assert orthogonal_analyzer(math.pi / 4) == pytest.approx(MINUS)


def test_amplitude_anti_correlation() -> None:
    setting = MeasurementSetting.from_analyzers(PLUS, MINUS)

    assert joint_amplitude(MAX_ENTANGLED, setting) == pytest.approx(0.0, abs=1e-16)


def test_amplitude_partial_state_minus_minus_prime() -> None:
    setting = MeasurementSetting.from_analyzers(MINUS, MINUS_PRIME)

    amplitude = joint_amplitude(HARDY, setting)

    assert amplitude == pytest.approx(-24 / (25 * math.sqrt(2)))


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_product_state_amplitude_is_c_times_g(beta1: float, beta2: float) -> None:
    setting = MeasurementSetting.from_analyzers(analyzer(beta1), analyzer(beta2))

    amplitude = joint_amplitude(TwoQubitState(1.0, 0.0), setting)

    assert amplitude == pytest.approx(setting.c * setting.g, abs=1e-15)


def test_table_maximally_entangled_diagonal() -> None:
    table = probability_table(MAX_ENTANGLED, (PLUS, MINUS), (PLUS, MINUS))

    assert np.allclose(table, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)


def test_table_partial_state() -> None:
    table = probability_table(HARDY, (PLUS, MINUS), (PLUS_PRIME, MINUS_PRIME))

    expected = [[0.5, 0.0], [49 / 1250, 576 / 1250]]
    assert np.allclose(table, expected, rtol=0, atol=1e-12)


def test_table_schmidt_basis() -> None:
    h, v = (1.0, 0.0), (0.0, 1.0)

    table = probability_table(HARDY, (h, v), (h, v))

    assert np.allclose(table, [[0.0, 0.36], [0.64, 0.0]], atol=1e-15)


def test_table_rejects_non_orthogonal_basis() -> None:
    with pytest.raises(DomainError):
        probability_table(HARDY, (PLUS, PLUS), (PLUS, MINUS))


def test_table_rejects_non_normalized_basis() -> None:
    with pytest.raises(DomainError):
        probability_table(HARDY, (PLUS, MINUS), ((1.0, 1.0), (1.0, -1.0)))


def test_tables_sum_to_one() -> None:
    rng = np.random.default_rng(11)

    for _ in range(1000):
        state = TwoQubitState.from_angle(rng.uniform(0, math.pi / 2), rng.uniform(0, 6))
        setting = random_setting(rng)
        # The orthogonal complement of (x, y) is (-y*, x*)
        basis1 = (setting.wing1, (-setting.d.conjugate(), setting.c.conjugate()))
        basis2 = (setting.wing2, (-setting.g.conjugate(), setting.f.conjugate()))

        table = probability_table(state, basis1, basis2)

        assert sum(sum(row) for row in table) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    ("state", "wing1", "wing2", "expected"),
    [
        (HARDY, CHI, PLUS_PRIME, True),
        (HARDY, MINUS, PHI, True),
        (HARDY, PLUS, MINUS_PRIME, True),
        (HARDY, CHI, PHI, False),
        (MAX_ENTANGLED, PLUS, PLUS, False),
    ],
)
def test_is_forbidden(
    state: TwoQubitState,
    wing1: tuple[complex, complex],
    wing2: tuple[complex, complex],
    expected: bool,
) -> None:
    setting = MeasurementSetting.from_analyzers(wing1, wing2)

    assert is_forbidden(state, setting, 1e-24) is expected


def test_is_forbidden_requires_positive_tol() -> None:
    setting = MeasurementSetting.from_analyzers(PLUS, PLUS)

    with pytest.raises(DomainError):
        is_forbidden(MAX_ENTANGLED, setting, 0.0)


def test_is_forbidden_matches_amplitude_threshold() -> None:
    rng = np.random.default_rng(3)
    state = TwoQubitState.from_angle(0.7)

    for tol in (1e-2, 1e-1, 0.3):
        setting = random_setting(rng)
        amplitude = abs(joint_amplitude(state, setting))
        assert is_forbidden(state, setting, tol) is (amplitude < math.sqrt(tol))


def test_compensated_setting_cancels_source_phase() -> None:
    rng = np.random.default_rng(5)

    for _ in range(100):
        theta, delta = rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi)
        setting = random_setting(rng)
        plain = TwoQubitState.from_angle(theta)
        plated = TwoQubitState.from_angle(theta, delta)

        compensated = compensated_setting(setting, delta)

        assert abs(joint_amplitude(plated, compensated)) == pytest.approx(
            abs(joint_amplitude(plain, setting)), abs=1e-15
        )


def test_exact_table_partial_state() -> None:
    h = sp.sqrt(2) / 2
    basis1 = ((h, h), (h, -h))
    basis2 = (
        (sp.Rational(4, 5), sp.Rational(3, 5)),
        (sp.Rational(3, 5), -sp.Rational(4, 5)),
    )

    table = exact_probability_table(
        (sp.Rational(3, 5), sp.Rational(4, 5), sp.Integer(0)), basis1, basis2
    )

    assert table == (
        (sp.Rational(1, 2), 0),
        (sp.Rational(49, 1250), sp.Rational(576, 1250)),
    )


def test_exact_probability_singlet_phase() -> None:
    h = sp.sqrt(2) / 2

    same = exact_joint_probability(h, h, sp.pi, h, h, h, h)
    opposite = exact_joint_probability(h, h, sp.pi, h, h, h, -h)

    assert same == 0
    assert opposite == sp.Rational(1, 2)


def test_exact_probability_hardy_nonzero_case() -> None:
    root = sp.sqrt(337)
    prob = exact_joint_probability(
        sp.Rational(3, 5),
        sp.Rational(4, 5),
        sp.Integer(0),
        16 / root,
        -9 / root,
        sp.Rational(3, 5),
        sp.Rational(4, 5),
    )

    assert prob == sp.Rational(7056, 210625)

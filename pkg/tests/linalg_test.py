from __future__ import annotations

import numpy as np
import pytest

from classical_pdc._errors import ConvergenceError
from classical_pdc._errors import DomainError
from classical_pdc.linalg import jacobi_eigh


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, n))
    return x + x.T


def test_diagonal_matrix_is_already_solved() -> None:
    values, vectors = jacobi_eigh(np.diag([3.0, -1.0, 2.0, 0.5]))

    assert values.tolist() == [-1.0, 0.5, 2.0, 3.0]
    assert np.allclose(np.abs(vectors), np.eye(4)[:, [1, 3, 2, 0]])


def test_zero_matrix() -> None:
    values, vectors = jacobi_eigh(np.zeros((4, 4)))

    assert values.tolist() == [0.0, 0.0, 0.0, 0.0]
    assert np.allclose(vectors, np.eye(4))


def test_two_by_two_known_values() -> None:
    values, vectors = jacobi_eigh([[2.0, 1.0], [1.0, 2.0]])

    assert values == pytest.approx([1.0, 3.0])
    assert np.abs(vectors[:, 1]) == pytest.approx([2**-0.5, 2**-0.5])


@pytest.mark.parametrize("seed", range(20))
def test_matches_numpy_on_random_matrices(seed: int) -> None:
    matrix = random_symmetric(np.random.default_rng(seed), 4)

    values, vectors = jacobi_eigh(matrix)

    assert np.allclose(values, np.linalg.eigvalsh(matrix), rtol=0, atol=1e-12)
    assert np.allclose(matrix @ vectors, vectors * values, atol=1e-12)
    assert np.allclose(vectors.T @ vectors, np.eye(4), atol=1e-12)


def test_degenerate_spectrum() -> None:
    rng = np.random.default_rng(99)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    matrix = q @ np.diag([1.0, 1.0, 1.0, -2.0]) @ q.T

    values, vectors = jacobi_eigh(matrix)

    assert values == pytest.approx([-2.0, 1.0, 1.0, 1.0])
    assert np.allclose(matrix @ vectors, vectors * values, atol=1e-12)


def test_input_not_modified() -> None:
    matrix = random_symmetric(np.random.default_rng(1), 4)
    copy = matrix.copy()

    jacobi_eigh(matrix)

    assert np.array_equal(matrix, copy)


@pytest.mark.parametrize(
    "matrix",
    [
        np.zeros((3, 4)),
        np.zeros(4),
        np.array([[1.0, 2.0], [0.0, 1.0]]),
        np.array([[1.0, np.nan], [np.nan, 1.0]]),
    ],
)
def test_rejects_bad_input(matrix: np.ndarray) -> None:
    with pytest.raises(DomainError):
        jacobi_eigh(matrix)


def test_raises_when_sweeps_run_out() -> None:
    matrix = random_symmetric(np.random.default_rng(4), 4)

    with pytest.raises(ConvergenceError):
        jacobi_eigh(matrix, max_sweeps=1)

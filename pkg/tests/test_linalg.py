import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DimensionMismatchError, InvalidStateError, NotHermitianError
from core.haar import haar_unitary, substream
from core.linalg import dagger, hermitian_eigendecomposition, hs_inner, kron, maximally_entangled_state, validate_unitary
from core.models import DensityMatrix, PureState
from tests.conftest import random_hermitian, random_matrix

X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Z2 = np.diag([1, -1]).astype(complex)

dims = st.integers(min_value=2, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_of_identities_is_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_places_first_factor_on_the_left_qubit():
    ket_00 = np.array([1, 0, 0, 0])
    assert np.array_equal(kron(X2, np.eye(2)) @ ket_00, np.array([0, 0, 1, 0]))


def test_kron_of_qutrit_clocks_has_product_diagonal():
    omega = np.exp(2j * np.pi / 3)
    z3 = np.diag([1, omega, omega**2])
    expected = np.array([1, omega, omega**2, omega, omega**2, 1, omega**2, 1, omega])
    assert np.allclose(np.diag(kron(z3, z3)), expected, atol=1e-12)


def test_kron_is_associative():
    a, b, c = random_matrix(2, 1), random_matrix(3, 2), random_matrix(2, 3)
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12, rtol=0)


def test_dagger_examples():
    assert np.array_equal(dagger(np.eye(3)), np.eye(3))
    assert np.array_equal(dagger(np.array([[0, -1], [1, 0]])), np.array([[0, 1], [-1, 0]]))
    a = random_matrix(4, 5)
    assert np.array_equal(dagger(dagger(a)), a)


def test_hs_inner_examples():
    assert hs_inner(np.eye(5), np.eye(5)) == pytest.approx(5)
    assert abs(hs_inner(X2, Z2)) < 1e-15
    a = random_matrix(3, 8)
    norm = hs_inner(a, a)
    assert norm.imag == pytest.approx(0, abs=1e-12)
    assert norm.real == pytest.approx(np.linalg.norm(a) ** 2)


def test_hs_inner_rejects_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        hs_inner(np.eye(2), np.eye(3))


@settings(max_examples=25, deadline=None)
@given(d=dims, seed=seeds)
def test_hs_inner_is_sesquilinear(d, seed):
    a, b, c = random_matrix(d, seed), random_matrix(d, seed + 1), random_matrix(d, seed + 2)
    alpha, beta = 0.3 - 1.2j, -0.7 + 0.4j
    assert abs(hs_inner(alpha * a + beta * b, c) - (np.conj(alpha) * hs_inner(a, c) + np.conj(beta) * hs_inner(b, c))) < 1e-12 * (1 + abs(hs_inner(a, c)))
    assert abs(hs_inner(a, alpha * b + beta * c) - (alpha * hs_inner(a, b) + beta * hs_inner(a, c))) < 1e-12 * (1 + abs(hs_inner(a, b)))


def test_validate_unitary_examples():
    assert validate_unitary(np.eye(3))
    assert not validate_unitary(np.diag([1, 2]))
    assert not validate_unitary(np.ones((2, 3)))
    assert validate_unitary(haar_unitary(6, substream(3)), 1e-10)


def test_eigendecomposition_sorts_ascending():
    eigenvalues, _ = hermitian_eigendecomposition(np.diag([3.0, 1.0]))
    assert np.allclose(eigenvalues, [1, 3])


def test_eigendecomposition_of_pauli_x():
    eigenvalues, eigenvectors = hermitian_eigendecomposition(X2)
    assert np.allclose(eigenvalues, [-1, 1])
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(np.vdot(minus, eigenvectors[:, 0])) == pytest.approx(1)
    assert abs(np.vdot(plus, eigenvectors[:, 1])) == pytest.approx(1)


@pytest.mark.parametrize("d", [2, 5, 16, 32])
def test_eigendecomposition_reconstructs(d):
    a = random_hermitian(d, d)
    eigenvalues, v = hermitian_eigendecomposition(a)
    assert validate_unitary(v)
    assert np.linalg.norm(v @ np.diag(eigenvalues) @ dagger(v) - a) < 1e-9


def test_eigendecomposition_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigendecomposition(np.array([[0, 1], [0, 0]]))


@settings(max_examples=40, deadline=None)
@given(d=dims, seed=seeds)
def test_transpose_moves_across_maximally_entangled_state(d, seed):
    a = random_matrix(d, seed)
    phi = maximally_entangled_state(d)
    left = np.kron(a, np.eye(d)) @ phi
    right = np.kron(np.eye(d), a.T) @ phi
    assert np.max(np.abs(left - right)) < 1e-12


def test_maximally_entangled_state_with_local_unitary_stays_normalized():
    v = haar_unitary(3, substream(12))
    phi = maximally_entangled_state(3, v)
    assert np.linalg.norm(phi) == pytest.approx(1)


def test_pure_state_rejects_unnormalized_vector():
    with pytest.raises(InvalidStateError):
        PureState(np.array([1, 1]))
    assert PureState.from_vector([1, 1j]).dim == 2


@pytest.mark.parametrize(
    "matrix",
    [
        np.array([[0.5, 0.5], [0, 0.5]]),  # not Hermitian
        np.eye(2),  # trace 2
        np.array([[1.5, 0], [0, -0.5]]),  # negative eigenvalue
    ],
)
def test_density_matrix_invariants(matrix):
    with pytest.raises(InvalidStateError):
        DensityMatrix(matrix)


def test_density_matrix_is_immutable():
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1

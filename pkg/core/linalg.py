import logging
from typing import Optional, Tuple

import numpy as np

from core.errors import DimensionMismatchError, FidelityError, NotHermitianError

logger = logging.getLogger(__name__)

# Structural validations (unitarity, trace preservation, density matrices)
STRUCTURE_TOL = 1e-10
# Algebraic identities
IDENTITY_TOL = 1e-12
# Hermiticity accepted by the eigensolver
HERMITIAN_INPUT_TOL = 1e-8


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array (the ComplexMatrix carrier)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FidelityError(f"{name} has non-finite entries")
    return m


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # result[i*p + k, j*q + l] = a[i, j] * b[k, l]
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a† b), conjugate-linear in ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"hs_inner shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def validate_unitary(a: np.ndarray, tol: float = STRUCTURE_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_deviation(dagger(a) @ a, np.eye(a.shape[0])) <= tol


def hermitian_eigendecomposition(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return ascending real eigenvalues and a unitary matrix of eigenvectors (columns)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"eigendecomposition needs a square matrix, got {a.shape}")
    deviation = max_deviation(a, dagger(a))
    if deviation > HERMITIAN_INPUT_TOL:
        raise NotHermitianError(f"matrix is not Hermitian: max |A - A†| = {deviation:.3e}")

    eigenvalues, eigenvectors = np.linalg.eigh((a + dagger(a)) / 2)
    return eigenvalues, eigenvectors


def vec_row(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def maximally_entangled_state(d: int, local_unitary: Optional[np.ndarray] = None) -> np.ndarray:
    """Amplitudes of sum_j |j>|j>/sqrt(d) on R (first factor) tensor Q.

    With ``local_unitary`` V the state (V tensor I)|phi> is returned instead.
    """
    phi = np.zeros(d * d, dtype=np.complex128)
    phi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    if local_unitary is not None:
        phi = np.kron(as_matrix(local_unitary, "local_unitary"), np.eye(d)) @ phi
    return phi

import logging
from typing import Optional, Sequence

import numpy as np

from core.errors import InvalidBasisError, ParameterRangeError
from core.haar import substream
from core.linalg import STRUCTURE_TOL, dagger, max_deviation, maximally_entangled_state, validate_unitary
from core.models import BasisLabel, UnitaryOperatorBasis

logger = logging.getLogger(__name__)


def _roots_of_unity(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def shift_clock_element(d: int, k: int, l: int) -> np.ndarray:
    """X^k Z^l with X|j> = |j+1 mod d> and Z|j> = w^j |j>."""
    # X^k Z^l |j> = w^(j*l mod d) |j+k mod d>; phases indexed exactly, no matrix powers
    omega = _roots_of_unity(d)
    j = np.arange(d)
    element = np.zeros((d, d), dtype=np.complex128)
    element[(j + k) % d, j] = omega[(j * l) % d]
    return element


def shift_clock_basis(d: int) -> UnitaryOperatorBasis:
    if d < 2:
        raise ParameterRangeError(f"shift/clock basis needs d >= 2, got {d}")
    elements = []
    labels = []
    # index j = k*d + l
    for k in range(d):
        for l in range(d):
            elements.append(shift_clock_element(d, k, l))
            labels.append((k, l))
    return UnitaryOperatorBasis(tuple(elements), tuple(labels))


def shift_operator(d: int) -> np.ndarray:
    return shift_clock_element(d, 1, 0)


def clock_operator(d: int) -> np.ndarray:
    return shift_clock_element(d, 0, 1)


PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pauli_basis() -> UnitaryOperatorBasis:
    return UnitaryOperatorBasis((PAULI_I, PAULI_X, PAULI_Y, PAULI_Z), ("I", "X", "Y", "Z"))


def orthogonality_matrix(b: UnitaryOperatorBasis) -> np.ndarray:
    """Matrix of tr(U_j† U_k)."""
    stack = b.stack().reshape(len(b), -1)
    return stack.conj() @ stack.T


def validate_basis(b: UnitaryOperatorBasis, tol: float = STRUCTURE_TOL) -> bool:
    d = b.dim
    if len(b) != d * d:
        logger.debug(f"Basis has {len(b)} elements, expected {d * d}")
        return False
    for label, element in zip(b.labels, b.elements):
        if not validate_unitary(element, tol):
            logger.debug(f"Basis element {label} is not unitary")
            return False
    deviation = max_deviation(orthogonality_matrix(b), d * np.eye(d * d))
    if deviation > tol:
        logger.debug(f"Basis is not orthogonal: max |tr(Uj†Uk) - d delta_jk| = {deviation:.3e}")
        return False
    return True


def make_basis(elements: Sequence[np.ndarray], labels: Optional[Sequence[BasisLabel]] = None, tol: float = STRUCTURE_TOL) -> UnitaryOperatorBasis:
    """Build a user-supplied basis, rejecting it unless every invariant holds."""
    labels = tuple(labels) if labels is not None else tuple(f"U{j}" for j in range(len(elements)))
    basis = UnitaryOperatorBasis(tuple(elements), labels)
    if not validate_basis(basis, tol):
        raise InvalidBasisError(f"operators do not form an orthogonal unitary basis at tolerance {tol:g}")
    return basis


def rephased_basis(b: UnitaryOperatorBasis, seed: int) -> UnitaryOperatorBasis:
    """Multiply each element by a random global phase e^{i theta_j}."""
    rng = substream(seed)
    thetas = rng.uniform(0, 2 * np.pi, size=len(b))
    return UnitaryOperatorBasis(tuple(np.exp(1j * t) * e for t, e in zip(thetas, b.elements)), b.labels)


def conjugated_basis(b: UnitaryOperatorBasis, v: np.ndarray) -> UnitaryOperatorBasis:
    v = np.asarray(v, dtype=np.complex128)
    return UnitaryOperatorBasis(tuple(v @ e @ dagger(v) for e in b.elements), b.labels)


def entangled_state_decomposition_check(b: UnitaryOperatorBasis) -> float:
    """Max elementwise deviation between |phi><phi| and sum_j (U_j* kron U_j)/d²."""
    d = b.dim
    phi = maximally_entangled_state(d)
    target = np.outer(phi, phi.conj())
    decomposition = sum(np.kron(e.conj(), e) for e in b.elements) / d**2
    return max_deviation(target, decomposition)

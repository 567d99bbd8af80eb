"""Closed-form fidelity quantities.

All sums over basis elements are evaluated literally, one trace per element, so each formula
can be checked against the others term for term.
"""

import logging
from typing import Literal, Optional, Sequence, Union

import numpy as np

from core.basis import PAULI_X, PAULI_Y, PAULI_Z, shift_clock_basis
from core.channels import apply_operator, choi_matrix, choi_overlap, compose, unitary_channel
from core.errors import DimensionMismatchError, NotUnitaryError
from core.linalg import STRUCTURE_TOL, as_matrix, dagger, validate_unitary
from core.models import AlphaMatrix, DensityMatrix, FidelityMethod, FidelityValue, QuantumChannel, UnitaryOperatorBasis, as_operator

logger = logging.getLogger(__name__)

EntanglementRoute = Literal["choi", "basis-sum"]


def check_gate(gate: np.ndarray, dim: int) -> np.ndarray:
    gate = as_matrix(gate, "gate")
    if gate.shape != (dim, dim):
        raise DimensionMismatchError(f"gate has shape {gate.shape}, channel acts on dimension {dim}")
    if not validate_unitary(gate, STRUCTURE_TOL):
        raise NotUnitaryError("gate is not unitary")
    return gate


def _resolve_basis(basis: Optional[UnitaryOperatorBasis], dim: int) -> UnitaryOperatorBasis:
    if basis is None:
        return shift_clock_basis(dim)
    if basis.dim != dim:
        raise DimensionMismatchError(f"basis has dimension {basis.dim}, channel acts on dimension {dim}")
    return basis


def entanglement_fidelity(ch: QuantumChannel, route: EntanglementRoute = "choi", basis: Optional[UnitaryOperatorBasis] = None) -> FidelityValue:
    if route == "choi":
        return FidelityValue(choi_overlap(choi_matrix(ch)), FidelityMethod.CHOI)
    if route != "basis-sum":
        raise ValueError(f"Unknown entanglement fidelity route: {route}")

    d = ch.dim
    basis = _resolve_basis(basis, d)
    total = sum(np.trace(dagger(u) @ apply_operator(ch, u)) for u in basis.elements)
    return FidelityValue(float(np.real(total)) / d**3, FidelityMethod.BASIS_SUM)


def entanglement_fidelity_with_reference(ch: QuantumChannel, local_unitary: np.ndarray) -> FidelityValue:
    """Entanglement fidelity measured on (V kron I)|phi> instead of the canonical state."""
    return FidelityValue(choi_overlap(_reference_rotated_choi(ch, local_unitary), local_unitary), FidelityMethod.CHOI)


def _reference_rotated_choi(ch: QuantumChannel, v: np.ndarray) -> np.ndarray:
    d = ch.dim
    rotation = np.kron(np.asarray(v, dtype=np.complex128), np.eye(d))
    return rotation @ choi_matrix(ch) @ dagger(rotation)


def horodecki(entanglement: float, d: int) -> float:
    return (d * entanglement + 1) / (d + 1)


def average_fidelity(ch: QuantumChannel) -> FidelityValue:
    f_e = entanglement_fidelity(ch, "choi").value
    return FidelityValue(horodecki(f_e, ch.dim), FidelityMethod.HORODECKI)


def average_gate_fidelity(ch: QuantumChannel, gate: np.ndarray, basis: Optional[UnitaryOperatorBasis] = None) -> FidelityValue:
    """[sum_j tr(U U_j† U† E(U_j)) + d²] / [d²(d+1)]."""
    d = ch.dim
    gate = check_gate(gate, d)
    basis = _resolve_basis(basis, d)
    total = sum(np.trace(gate @ dagger(u) @ dagger(gate) @ apply_operator(ch, u)) for u in basis.elements)
    return FidelityValue((float(np.real(total)) + d**2) / (d**2 * (d + 1)), FidelityMethod.GATE_FORMULA)


def average_gate_fidelity_composed(ch: QuantumChannel, gate: np.ndarray) -> FidelityValue:
    """Horodecki average fidelity of U†∘E."""
    gate = check_gate(gate, ch.dim)
    return average_fidelity(compose(ch, unitary_channel(dagger(gate))))


def average_gate_fidelity_qubit(ch: QuantumChannel, gate: np.ndarray) -> FidelityValue:
    if ch.dim != 2:
        raise DimensionMismatchError(f"qubit closed form needs d = 2, channel acts on dimension {ch.dim}")
    gate = check_gate(gate, 2)
    total = sum(np.trace(gate @ sigma @ dagger(gate) @ apply_operator(ch, sigma)) for sigma in (PAULI_X, PAULI_Y, PAULI_Z))
    return FidelityValue(0.5 + float(np.real(total)) / 12, FidelityMethod.QUBIT_CLOSED_FORM)


def average_gate_fidelity_from_states(
    outputs: Sequence[Union[np.ndarray, DensityMatrix]],
    alphas: AlphaMatrix,
    gate: np.ndarray,
    basis: Optional[UnitaryOperatorBasis] = None,
) -> FidelityValue:
    """[sum_jk alpha_jk tr(U U_j† U† E(rho_k)) + d²] / [d²(d+1)] from measured or exact outputs E(rho_k)."""
    if not outputs:
        raise DimensionMismatchError("no channel outputs given")
    ops = np.stack([as_operator(o) for o in outputs])
    d = ops.shape[-1]
    if ops.shape != (d * d, d, d):
        raise DimensionMismatchError(f"expected {d * d} outputs of shape {(d, d)}, got array of shape {ops.shape}")
    if alphas.entries.shape != (d * d, d * d):
        raise DimensionMismatchError(f"alpha matrix has shape {alphas.entries.shape}, expected {(d * d, d * d)}")
    gate = check_gate(gate, d)
    basis = _resolve_basis(basis, d)

    total = 0j
    for j, u in enumerate(basis.elements):
        left = gate @ dagger(u) @ dagger(gate)
        # tr(left @ out_k) for every k at once
        traces = np.einsum("ab,kba->k", left, ops)
        total += alphas.entries[j] @ traces
    value = (float(np.real(total)) + d**2) / (d**2 * (d + 1))
    if not -STRUCTURE_TOL <= value <= 1 + STRUCTURE_TOL:
        logger.warning(f"State-basis fidelity estimate {value:.6f} lies outside [0, 1]; it will be clamped in reports")
    return FidelityValue(value, FidelityMethod.STATE_BASIS)

"""Simulated experimental route: prepare an operator-spanning set of states, send them through the
channel, reconstruct the outputs by finite-shot state tomography and plug them into the alpha formula.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve

from core.basis import shift_clock_basis
from core.channels import apply_operator
from core.errors import DimensionMismatchError, ParameterRangeError, SingularBasisError
from core.fidelity import average_gate_fidelity_from_states, check_gate
from core.haar import substream
from core.linalg import dagger, hermitian_eigendecomposition, vec_row
from core.models import AlphaMatrix, McEstimate, PreparationBasis, PureState, QuantumChannel, TomographyResult, UnitaryOperatorBasis
from core.montecarlo import ordered_map

logger = logging.getLogger(__name__)

ALPHA_RESIDUAL_TOL = 1e-8


def standard_preparation_basis(d: int) -> PreparationBasis:
    """|j>, then (|j>+|k>)/sqrt2, then (|j>+i|k>)/sqrt2, pairs j<k in lexicographic order."""
    if d < 2:
        raise ParameterRangeError(f"preparation basis needs d >= 2, got {d}")
    eye = np.eye(d, dtype=np.complex128)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    vectors = list(eye)
    vectors += [(eye[j] + eye[k]) / np.sqrt(2) for j, k in pairs]
    vectors += [(eye[j] + 1j * eye[k]) / np.sqrt(2) for j, k in pairs]
    return PreparationBasis(tuple(PureState(v) for v in vectors))


def make_preparation_basis(states: Sequence[Sequence[complex]]) -> PreparationBasis:
    return PreparationBasis(tuple(PureState.from_vector(s) for s in states))


def solve_alphas(ub: UnitaryOperatorBasis, pb: PreparationBasis) -> AlphaMatrix:
    if ub.dim != pb.dim:
        raise DimensionMismatchError(f"operator basis has dimension {ub.dim}, preparation basis {pb.dim}")
    rhos = pb.operator_matrix()
    targets = np.stack([vec_row(u) for u in ub.elements], axis=1)
    try:
        coefficients = solve(rhos, targets)
    except LinAlgError as e:
        raise SingularBasisError(f"preparation states do not span the operator space: {e}") from e

    alphas = AlphaMatrix(coefficients.T)
    residual = alphas.reconstruction_residual(ub, pb)
    if residual > ALPHA_RESIDUAL_TOL:
        raise SingularBasisError(f"alpha reconstruction residual {residual:.3e} exceeds {ALPHA_RESIDUAL_TOL:g}")
    return alphas


@lru_cache(maxsize=32)
def measurement_basis(d: int) -> Tuple[np.ndarray, ...]:
    """Hermitian, HS-orthonormal: I/sqrt(d), then symmetric, antisymmetric and diagonal Gell-Mann matrices."""
    elements = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1 / np.sqrt(2)
        elements.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j / np.sqrt(2)
        g[k, j] = 1j / np.sqrt(2)
        elements.append(g)
    for l in range(1, d):
        diagonal = np.zeros(d)
        diagonal[:l] = 1
        diagonal[l] = -l
        elements.append(np.diag(diagonal / np.sqrt(l * (l + 1))).astype(np.complex128))
    for g in elements:
        g.flags.writeable = False
    return tuple(elements)


@lru_cache(maxsize=32)
def _measurement_settings(d: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    # eigenbasis of each traceless element; the identity needs no measurement
    return tuple(hermitian_eigendecomposition(g) for g in measurement_basis(d)[1:])


def _reconstruct(output: np.ndarray, shots: int, rng: Optional[np.random.Generator]) -> np.ndarray:
    d = output.shape[0]
    basis = measurement_basis(d)
    estimate = basis[0] / np.sqrt(d)
    for g, (eigenvalues, eigenvectors) in zip(basis[1:], _measurement_settings(d)):
        probabilities = np.clip(np.real(np.einsum("ai,ab,bi->i", eigenvectors.conj(), output, eigenvectors)), 0, None)
        probabilities /= probabilities.sum()
        if rng is not None:
            probabilities = rng.multinomial(shots, probabilities) / shots
        estimate = estimate + float(probabilities @ eigenvalues) * g
    return (estimate + dagger(estimate)) / 2


def simulate_tomography(
    ch: QuantumChannel,
    pb: PreparationBasis,
    shots: int,
    seed: int,
    exact: bool = False,
    stream: Tuple[int, ...] = (),
) -> TomographyResult:
    """Linear-inversion tomography of E(rho_k) for every preparation state.

    State k draws its counts from sub-stream ``(seed, *stream, k)``. With ``exact`` the outcome
    probabilities are used directly instead of multinomial frequencies.
    """
    if pb.dim != ch.dim:
        raise DimensionMismatchError(f"preparation basis has dimension {pb.dim}, channel acts on dimension {ch.dim}")
    if shots < 1:
        raise ParameterRangeError(f"shots must be positive, got {shots}")

    estimates = []
    for k, rho in enumerate(pb.projectors()):
        rng = None if exact else substream(seed, *stream, k)
        estimates.append(_reconstruct(apply_operator(ch, rho), shots, rng))
    result = TomographyResult(tuple(estimates), shots_per_setting=shots, seed=seed, exact=exact)

    if not exact:
        negative = int(np.sum(result.min_eigenvalues() < 0))
        if negative:
            logger.debug(f"{negative} of {len(estimates)} tomographic estimates are not positive semidefinite")
    return result


def estimate_fidelity_experiment(
    ch: QuantumChannel,
    gate: np.ndarray,
    shots: int,
    seed: int,
    repeats: int,
    basis: Optional[UnitaryOperatorBasis] = None,
    preparation: Optional[PreparationBasis] = None,
    exact: bool = False,
    workers: Optional[int] = None,
) -> McEstimate:
    """Mean and standard error of the state-basis fidelity over ``repeats`` independent tomography runs."""
    if repeats < 1:
        raise ParameterRangeError(f"repeats must be positive, got {repeats}")
    d = ch.dim
    gate = check_gate(gate, d)
    basis = basis or shift_clock_basis(d)
    preparation = preparation or standard_preparation_basis(d)
    alphas = solve_alphas(basis, preparation)

    def run_repeat(r: int) -> float:
        result = simulate_tomography(ch, preparation, shots, seed, exact=exact, stream=(r,))
        value = average_gate_fidelity_from_states(result.estimates, alphas, gate, basis).value
        logger.debug(f"Tomography repeat {r}: fidelity {value:.6f}")
        return value

    values: List[float] = ordered_map(run_repeat, range(repeats), workers)
    estimate = McEstimate.from_samples(values, seed)
    logger.info(f"Experimental fidelity: {estimate.mean:.6f} +/- {estimate.std_error:.2e} ({repeats} repeats x {shots} shots)")
    if estimate.clamped:
        logger.warning(f"Experimental mean {estimate.mean:.6f} lies outside [0, 1]; reporting {estimate.reported:.6f}")
    return estimate
